from src.solver.conesta import MU_MIN, TAU, conesta, mu_opt
from src.solver.fista import FistaResult, fista
from src.solver.problem import RidgeSmoothedProblem, duality_gap
from src.solver.prox import prox_l1

__all__ = [
    "MU_MIN",
    "TAU",
    "FistaResult",
    "RidgeSmoothedProblem",
    "conesta",
    "duality_gap",
    "fista",
    "mu_opt",
    "prox_l1",
]
