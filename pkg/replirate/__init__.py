"""Models of replication sequences and their discriminability"""

__version__ = "0.1.0"
