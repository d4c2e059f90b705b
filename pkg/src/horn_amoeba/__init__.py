"""Horn hypergeometric systems, their supports and fans, and amoebas of their singular loci."""
from .algebra import MultiPoly, RationalFn, parse_poly
from .geometry import IntCone, LatticePolytope, Fan, newton_polytope, normal_fan, fan_check, dual_cone
from .horn import OreSatoCoefficient, HornSystem, horn_from_ore_sato

__version__ = "0.1.0"
