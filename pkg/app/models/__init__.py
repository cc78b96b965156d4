from app.models.certificate import SOSCertificate
from app.models.density import DensityGrid, GaussianMixture
from app.models.graph import Graph
from app.models.laplace import LaplaceMeasure
from app.models.moment import MomentExpr, MomentMonomial, RhoPolynomial
from app.models.relation_basis import RelationBasis

__all__ = [
    "SOSCertificate", "DensityGrid", "GaussianMixture", "Graph", "LaplaceMeasure",
    "MomentExpr", "MomentMonomial", "RhoPolynomial", "RelationBasis",
]
