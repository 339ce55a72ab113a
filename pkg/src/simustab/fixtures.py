"""Built-in plant families and Sigma presets."""
import numpy as np

from .ratmat import RationalFunction as RF
from .ratmat import RationalMatrix
from .stabdata import PlantPair


def _lin(root):
    """``s - root`` as ascending coefficients."""
    return [-root, 1.0]


def _quad(r1, r2, k=1.0):
    """``k (s - r1)(s - r2)``."""
    return [k * r1 * r2, -k * (r1 + r2), k]


def example1_plants():
    """First worked two-plant family (constant numerators, first-order denominators)."""
    N0 = RationalMatrix.constant([[1, 2], [3, 1]])
    D0 = RationalMatrix([[RF(_lin(2.0), [6, 1]), 1],
                         [3, RF(_lin(2.7), [10, 1])]])
    N1 = RationalMatrix.constant([[1, 2], [4, 3]])
    D1 = RationalMatrix([[RF(_lin(3.2), [2.2, 1]), 1],
                         [3, RF(_lin(7.7), [1, 1])]])
    return PlantPair(N0, D0, N1, D1)


def example2_plants():
    """Second worked family: second-order entries, complex unstable zeros."""
    q0 = [10, 2, 1]
    q1 = [15, 2, 1]
    N0 = RationalMatrix([[RF(_quad(1, 1, 3), q0), 5],
                         [4, RF(_quad(4, 2, 2), q0)]])
    D0 = RationalMatrix([[RF(_quad(2, 3, 2), q0), -1],
                         [3, RF(_quad(2, 2), q0)]])
    N1 = RationalMatrix([[RF(_quad(1, -1), q1), 6],
                         [7, RF(_quad(8, 1), q1)]])
    D1 = RationalMatrix([[RF(_quad(6, -2), q1), 2],
                         [-1, RF(_quad(5, 9, 3), q1)]])
    return PlantPair(N0, D0, N1, D1)


def synthetic_two_zero_plants():
    """A 2x2 family with two real unstable pencil zeros (about 8.30 and 0.767),
    so the normalized data has n = 1 and Sigma is 2x2."""
    N0 = RationalMatrix.constant([[1, 2], [3, 1]])
    D0 = RationalMatrix([[RF(_lin(7.3), [6.9, 1]), 2],
                         [-1, RF(_lin(7.5), [8.9, 1])]])
    N1 = RationalMatrix.constant([[1, 2], [4, 3]])
    D1 = RationalMatrix([[RF(_lin(-8.0), [2.4, 1]), -3],
                         [-2, RF(_lin(2.3), [1.7, 1])]])
    return PlantPair(N0, D0, N1, D1)


def trivial_plants():
    """Constant invertible pencil: no unstable zeros at all."""
    eye = np.eye(2)
    return PlantPair(RationalMatrix.constant(eye), RationalMatrix.constant(eye),
                     RationalMatrix.constant(eye), RationalMatrix.constant(2 * eye))


SIGMA_PRESETS = {
    "ex1": np.array([[0.3, 0.0], [0.0, 0.5]]),
    "a": np.array([[-0.1, -0.9], [0.4, -0.6]]),
    "b": np.array([[0.4, 0.1], [0.5, 0.4]]),
    "c": np.array([[0.2, 0.35], [0.6, 0.4]]),
    "d": np.array([[-0.8, 0.1], [0.6, -0.2]]),
    "e": np.array([[-0.65, 0.22], [0.8, -0.2]]),
    "f": np.array([[0.8, -0.33], [0.9, 0.7]]),
    "ex2": np.array([[0.4, 0.2], [0.3, -0.5], [0.8, -0.1], [0.6, -0.2]]),
}

EXAMPLES = {
    "example1": dict(plants=example1_plants, sigma="ex1", mode="direct"),
    "example2": dict(plants=example2_plants, sigma="ex2", mode="sqrt"),
    "synthetic": dict(plants=synthetic_two_zero_plants, sigma="ex1", mode="auto"),
}
