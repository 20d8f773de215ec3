"""gerbelab: exact Cech-Deligne algebra, local bundle gerbes and loop-space numerics."""

__version__ = "0.1.0"
