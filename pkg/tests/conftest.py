import pytest

from models.qubo import QuboMatrix
from models.schedule import Compressor, DrLoad
from tests.factories import make_instance


@pytest.fixture
def running_example():
    """Q00=-1, Q01=2, Q11=-1: optima [1,0] and [0,1] at -1"""
    return QuboMatrix.from_entries(2, [[0, 0, -1.0], [0, 1, 2.0], [1, 1, -1.0]])


@pytest.fixture
def single_compressor():
    """One compressor exactly covering one interval of demand"""
    return make_instance()


@pytest.fixture
def two_compressor_instance():
    return make_instance(
        horizon=3,
        compressors=[
            Compressor(id="cheap", capacity=2.0, energy_per_interval=2.0),
            Compressor(id="dear", capacity=1.0, energy_per_interval=1.5),
        ],
        dr_loads=[DrLoad(id="DR0", curtailable_kwh=0.5, max_activations=1, flow_relief=1.0)],
        price=[0.1, 0.2, 0.3],
        demand=[2.0, 1.0, 3.0],
        carbon=[200.0, 400.0, 300.0],
    )
