"""Exception hierarchy shared across the package."""


class DtwLvqError(ValueError):
    pass


class InputError(DtwLvqError):
    """Malformed time series or mismatched feature dimensions."""


class PathError(DtwLvqError):
    """Warping path violates the boundary or step conditions."""


class SizeError(DtwLvqError):
    pass


class ModelError(DtwLvqError):
    """Codebook cannot serve the requested operation."""


class ConfigError(DtwLvqError):
    pass


class ParseError(DtwLvqError):
    pass
