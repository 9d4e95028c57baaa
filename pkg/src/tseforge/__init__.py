"""Corpus synthesis and evaluation toolkit for target speaker extraction.

Builds (mixture, reference, target) triplets from utterance registries,
interpolates synthetic-speaker feature matrices, plans similarity-graded
training curricula, and scores externally produced estimates.
"""

__version__ = "0.1.0"

SAMPLE_RATE = 16000
