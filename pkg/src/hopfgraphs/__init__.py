"""Graph geometry of maps between round spheres: singular values, second
fundamental forms, Hopf fibrations, equivariant minimal maps and the structure
equations of minimal graphs, all checked numerically."""

from .equivariant import EquivariantMap, solve_bvp
from .errors import (
    BlowUp,
    ChartDegenerate,
    DenominatorUnderflow,
    GeometryError,
    NearConformalAmbiguity,
    NoBracket,
    NotMinimal,
    NumericalBreakdown,
    PoleSwapExhausted,
    RankDeficient,
    Stiffness,
)
from .graphcore import SphereMap, analyze, second_fundamental_form, singular_decompose
from .hopfmodels import (
    HopfComplex,
    HopfComposedMoebius,
    HopfOctonionic,
    HopfQuaternionic,
    MoebiusMap,
)
from .structure import (
    angle_functions,
    bochner_residuals,
    gauss_tensor,
    pinching_quantity,
    structure_residuals,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUp",
    "ChartDegenerate",
    "DenominatorUnderflow",
    "EquivariantMap",
    "GeometryError",
    "HopfComplex",
    "HopfComposedMoebius",
    "HopfOctonionic",
    "HopfQuaternionic",
    "MoebiusMap",
    "NearConformalAmbiguity",
    "NoBracket",
    "NotMinimal",
    "NumericalBreakdown",
    "PoleSwapExhausted",
    "RankDeficient",
    "SphereMap",
    "Stiffness",
    "analyze",
    "angle_functions",
    "bochner_residuals",
    "gauss_tensor",
    "pinching_quantity",
    "second_fundamental_form",
    "singular_decompose",
    "solve_bvp",
    "structure_residuals",
]
