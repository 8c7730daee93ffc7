"""Entanglement-witness search from full or partial expectation-value data."""

from .basis import (CoeffVector, HermitianOp, ObservableBasis, build_basis, devectorize,
                    hs_inner, spectral_decomp, vectorize)
from .optimizer import (OptConfig, OptResult, max_over_products, min_over_products,
                        subspace_contains_product, weak_opt_oracle)
from .separation import SeparationVerdict, SolverConfig, TargetPoint, wsep
from .states import (DensityMatrix, ProductState, bell_state, expectation, pauli, ppt_check,
                     product_state_density, random_product_state, werner)
from .witness import (Handedness, Witness, bell_inequality_check, classify, classify_spectral,
                      detect, witness_from_upb)

__version__ = "0.1.0"

__all__ = [
    "CoeffVector", "HermitianOp", "ObservableBasis", "build_basis", "devectorize", "hs_inner",
    "spectral_decomp", "vectorize",
    "OptConfig", "OptResult", "max_over_products", "min_over_products",
    "subspace_contains_product", "weak_opt_oracle",
    "SeparationVerdict", "SolverConfig", "TargetPoint", "wsep",
    "DensityMatrix", "ProductState", "bell_state", "expectation", "pauli", "ppt_check",
    "product_state_density", "random_product_state", "werner",
    "Handedness", "Witness", "bell_inequality_check", "classify", "classify_spectral",
    "detect", "witness_from_upb",
]
