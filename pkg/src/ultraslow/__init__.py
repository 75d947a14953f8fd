"""Distributed-order Prabhakar kernels, Volterra functions and ultraslow diffusion observables."""
__version__ = "0.1.0"
