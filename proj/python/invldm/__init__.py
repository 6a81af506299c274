"""Division-free inverse LDM factorization and V-BLAST detection."""

from ._invldm import (
    DimensionError,
    DivFreeFactors,
    InputError,
    SingularError,
    __version__,
    ber_sweep,
    count_ops,
    detect,
    divfree_factorize,
    divfree_ldl_hermitian,
    flop_sweep,
    inv_ldm,
    inv_lu,
)

__all__ = [
    "DimensionError",
    "DivFreeFactors",
    "InputError",
    "SingularError",
    "__version__",
    "ber_sweep",
    "count_ops",
    "detect",
    "divfree_factorize",
    "divfree_ldl_hermitian",
    "flop_sweep",
    "inv_ldm",
    "inv_lu",
]
