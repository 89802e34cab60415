"""Symbol calculus, spectral asymptotics and inverse problems for magnetic Steklov operators."""

__version__ = "0.1.0"

from .boundary import BoundaryComponent, SurfaceBoundary, load_boundary, make_flat_cylinder
from .dn_map import (
    SteklovCoeffs,
    boundary_spectrum_asymptotic,
    component_spectrum_asymptotic,
    dn_symbol,
    steklov_coeffs_closed,
    steklov_coeffs_via_nf,
)
from .errors import ToolkitError
from .normal_form import normal_form
from .oracles import CylinderModel, DiskFluxModel, ab_disk_spectrum, cylinder_spectrum
from .periodic import PeriodicFn
from .progressions import APPair, GenMultiset, almost_equal, classify_vs_single, sign_reduction
from .recovery import match_close, recover_multi, recover_single
from .spectrum import SpectrumSeq, merge_spectra
from .symbols import GradedSymbol, HomogComponent, adjoint, compose, parametrix
