import json
from pathlib import Path

import numpy as np
import pytest

from ccsplan.builder import COST_ONLY, MAX_REDUCTION_LEX, scenario_config
from ccsplan.dataio import load_validated, toy_nation_path
from ccsplan.domain import (
    GlobalParams,
    Horizon,
    ModelInstance,
    Region,
    RegionTech,
    TechKind,
    zero_tech,
)
from ccsplan.engine import run_scenario

GOLDEN_PATH = Path(__file__).parent / "golden" / "toy_nation.json"


def make_unit_instance(cap=50.0, ccs_capacity=30.0):
    """One region, one year, solar only; small enough to check by hand.

    Optimum under the yearly-split storage limit: install the full 4 GW of
    solar (offsets 40 t) and store 10 t to reach the 50 t ceiling, for a net
    objective of -6.
    """
    T = 1
    solar = RegionTech(g=np.array([10.0]), rp=np.array([8.0]), h=1.0, potential=4.0)
    region = Region(
        id="R",
        baseline_emissions=100.0,
        tech={TechKind.SOLAR: solar, TechKind.WIND: zero_tech(T)},
        ccs_capacity=ccs_capacity,
        location=(0.0, 0.0),
    )
    g = GlobalParams(
        cp=np.array([1.0]),
        ccsp=np.array([1.0]),
        gt=np.array([0.0]),
        cap=np.array([cap]),
        sp={TechKind.SOLAR: np.array([2.0]), TechKind.WIND: np.array([0.0])},
    )
    return ModelInstance(horizon=Horizon(2018, T), regions=[region], globals=g)


def make_trade_instance():
    """Two regions, one year, no renewables; the buyer must purchase storage.

    The seller's own emissions (5 t) cap its local storage once the per-region
    emission floor is on, so meeting the 60 t national ceiling forces 35 t of
    traded CCS.
    """
    T = 1

    def bare(rid, c0, cap_t, loc):
        return Region(
            id=rid,
            baseline_emissions=c0,
            tech={TechKind.SOLAR: zero_tech(T), TechKind.WIND: zero_tech(T)},
            ccs_capacity=cap_t,
            location=loc,
        )

    g = GlobalParams(
        cp=np.array([1.0]),
        ccsp=np.array([1.0]),
        gt=np.array([0.01]),
        cap=np.array([60.0]),
        sp={TechKind.SOLAR: np.zeros(T), TechKind.WIND: np.zeros(T)},
    )
    return ModelInstance(
        horizon=Horizon(2018, T),
        regions=[bare("seller", 5.0, 100.0, (0.0, 0.0)), bare("buyer", 95.0, 0.0, (0.0, 0.0))],
        globals=g,
        distances=np.array([[0.0, 100.0], [100.0, 0.0]]),
    )


@pytest.fixture
def unit_instance():
    return make_unit_instance()


@pytest.fixture(scope="session")
def toy_instance():
    return load_validated(toy_nation_path())


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN_PATH) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def toy_results_cost(toy_instance):
    return {
        sid: run_scenario(toy_instance, scenario_config(sid, objective_mode=COST_ONLY))
        for sid in (1, 2, 3, 4)
    }


@pytest.fixture(scope="session")
def toy_results_lex(toy_instance):
    return {
        sid: run_scenario(toy_instance, scenario_config(sid, objective_mode=MAX_REDUCTION_LEX))
        for sid in (1, 2, 3, 4)
    }
