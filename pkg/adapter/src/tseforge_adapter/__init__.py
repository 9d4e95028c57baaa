"""Extraction adapter: speaker embeddings and frame features as FMX1 files.

This package never imports tse-forge; it talks to it purely through file
formats (FMX1 matrices, TSV registries) and the `tse-forge` CLI.
"""

from .errors import AdapterError, AudioError, ModelLoadError, RegistryError
from .extract import ExtractionJob, JobReport, extract_embeddings, extract_frame_features

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AudioError",
    "ModelLoadError",
    "RegistryError",
    "ExtractionJob",
    "JobReport",
    "extract_embeddings",
    "extract_frame_features",
    "__version__",
]
