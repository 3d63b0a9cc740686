"""Feature extraction and annotation conversion for the MOST pipeline.

This package talks to the core pipeline only through its on-disk interfaces:
MOSTFEAT v1 feature files and the ground-truth JSON schema.
"""

__version__ = "0.1.0"
