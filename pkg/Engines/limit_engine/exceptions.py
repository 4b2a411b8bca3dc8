class ExactModeCapExceeded(RuntimeError):
    """Instance too large for exact-mode limit solving."""
