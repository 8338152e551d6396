"""Exception types shared across the package."""


class HgoeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HgoeError):
    """Caller supplied an invalid argument or inconsistent data."""


class InvariantError(HgoeError):
    """A structural rule of the graph or pipeline was violated."""


class FormatError(HgoeError):
    """A file (index, corpus, lexicon, embeddings, run, qrels) is malformed."""


class ConfigError(HgoeError):
    """An experiment configuration is incomplete or contradictory."""


class InternalError(HgoeError):
    """A state that should be unreachable was reached."""
