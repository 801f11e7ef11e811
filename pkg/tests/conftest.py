import sys
from pathlib import Path

import pytest
from scipy.constants import e as qe

sys.path.insert(0, str(Path(__file__).parent))

from kinq import materials, tline

CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture(scope="session")
def nb_film():
    """Niobium film with the 9.2 K parameter set (100 nm thick)."""
    return materials.SuperconductorSpec.create(
        T_c=9.2, lambda_L=33.3e-9, xi=39e-9, sigma_n=5.5e7,
        Delta0=1.395e-3 * qe, thickness=100e-9)


@pytest.fixture(scope="session")
def disordered_film():
    """The measured 7.47 K disordered film, 35 nm thick."""
    return materials.SuperconductorSpec.create(
        T_c=7.47, lambda_L=33.3e-9, xi=39e-9, sigma_n=1.15e7,
        thickness=35e-9)


@pytest.fixture(scope="session")
def cpw_10_6(nb_film):
    return tline.CpwGeometry(center_width=10e-6, gap=6e-6, film=nb_film,
                             substrate_eps_r=11.45,
                             substrate_thickness=500e-6)


@pytest.fixture(scope="session")
def configs_dir():
    return CONFIGS
