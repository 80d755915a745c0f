"""Second fundamental forms, normal radii and Lawlor certificates for Grassmannian cones."""

from .algebra import AlgebraElement, AlgebraField
from .exterior import MultiVector, OrientedPlane, is_decomposable, pluecker_embed
from .jordan import CayleyPoint, JordanElement
from .lawlor import Certificate, ConeCase, Profile, Verdict, certify, inequality_chains, vanishing_angle
from .projector import FMatrix, GrassmannianPoint, HermitianMatrix, cone_family

__all__ = [
    "AlgebraElement", "AlgebraField", "MultiVector", "OrientedPlane", "is_decomposable", "pluecker_embed",
    "CayleyPoint", "JordanElement", "Certificate", "ConeCase", "Profile", "Verdict", "certify",
    "inequality_chains", "vanishing_angle", "FMatrix", "GrassmannianPoint", "HermitianMatrix", "cone_family",
]
__version__ = "0.1.0"
