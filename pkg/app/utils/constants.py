# Exit codes
EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_INPUT_ERROR = 2

# Submodule labels
ZERO_SUBMODULE = "<0>"
DELTA_SUBMODULE = "<delta(t)>"
DELTA_BAR_SUBMODULE = "<delta(t^-1)>"


# Eisenstein shifts t -> t + c tried for c in [-EISENSTEIN_SHIFT, EISENSTEIN_SHIFT]
EISENSTEIN_SHIFT = 3

BULLET = "  - "
