import numpy as np

from cfc.collocation import CollocationSystem, SamplePlan


def make_system(A, b, columns=None, problem=None) -> CollocationSystem:
    """Wrap an arbitrary matrix/rhs pair as a collocation system for solver tests."""
    A = np.asarray(A, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    m, N = A.shape
    if columns is None:
        columns = tuple((k,) for k in range(N))
    plan = SamplePlan(points=np.zeros((m, 1)), seed=0, m=m, d=1)
    return CollocationSystem(matrix=A, rhs=b, columns=tuple(columns), plan=plan,
                             problem=problem)
