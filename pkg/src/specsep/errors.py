"""Exception hierarchy shared by all modules."""


class SpecSepError(Exception):
    """Base class for computation failures (CLI exit status 1)."""


class RootIsolationFailure(SpecSepError):
    pass


class RootSelectionAmbiguity(SpecSepError):
    pass


class NoMergeFound(SpecSepError):
    pass


class NoGap(SpecSepError):
    pass


class DegenerateSpike(SpecSepError):
    pass


class OutOfRange(SpecSepError):
    pass


class EigensolverFailure(SpecSepError):
    pass
