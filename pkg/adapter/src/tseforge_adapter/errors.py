"""Adapter exception hierarchy."""


class AdapterError(Exception):
    """Base class for everything this package raises deliberately."""


class RegistryError(AdapterError):
    """Registry TSV malformed: bad header, bad row, duplicate utt_id."""


class AudioError(AdapterError):
    """One utterance's audio is unreadable or unusable; jobs skip and continue."""


class ModelLoadError(AdapterError):
    """The requested model cannot be constructed (unknown id, missing stack,
    or no weights available)."""
