"""SIC POMs realized as two successive measurements: construction, verification, optics, tomography."""

__version__ = "0.1.0"
FORMAT_VERSION = "1"
