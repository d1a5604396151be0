"""Numerical kernels: dense linear algebra, graph spectra, quantization."""
