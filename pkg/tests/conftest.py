"""
Shared fixtures: bundled example inputs and loaded demo models.
"""

from pathlib import Path

import pytest

from coordsched_cli.config.loaders.contracts_loader import load_contracts
from coordsched_cli.config.loaders.platform_loader import load_platform
from coordsched_cli.core.dsl.parser import parse_app_file
from coordsched_cli.core.graph.model import build_graph
from coordsched_cli.core.scheduling.costs import CostModel

REPO = Path(__file__).resolve().parent.parent
APPS = REPO / "apps"
CONFIGS = REPO / "configs"

VISION = APPS / "vision" / "vision.coord"
VISION_FT = APPS / "vision" / "vision_ft.coord"
WIFI_MONO = APPS / "wifi" / "wifi_mono.coord"
WIFI_FORKJOIN = APPS / "wifi" / "wifi_forkjoin.coord"
WIFI_FORKJOIN_FT = APPS / "wifi" / "wifi_forkjoin_ft.coord"
PLATFORM = CONFIGS / "odroid_like.platform"
VISION_CONTRACTS = CONFIGS / "vision.contracts"
WIFI_CONTRACTS = CONFIGS / "wifi.contracts"
WIFI_FT_COMPARE = CONFIGS / "wifi_ft.compare.yml"


def load_graph(path):
    decl = parse_app_file(path)
    assert not isinstance(decl, list), decl
    graph = build_graph(decl)
    assert not isinstance(graph, list), graph
    return graph


@pytest.fixture(autouse=True)
def plain_colors(monkeypatch):
    """Assertions compare plain text."""
    monkeypatch.setenv("NO_COLOR", "1")


@pytest.fixture(scope="session")
def demo_platform():
    result = load_platform(PLATFORM)
    assert not isinstance(result, list), result
    return result


@pytest.fixture(scope="session")
def vision_contracts():
    result = load_contracts(VISION_CONTRACTS)
    assert not isinstance(result, list), result
    return result


@pytest.fixture(scope="session")
def wifi_contracts():
    result = load_contracts(WIFI_CONTRACTS)
    assert not isinstance(result, list), result
    return result


@pytest.fixture(scope="session")
def vision_graph():
    return load_graph(VISION)


@pytest.fixture
def vision_costs(demo_platform, vision_contracts):
    platform, scaling = demo_platform
    return CostModel(platform, vision_contracts, scaling)


@pytest.fixture
def wifi_costs(demo_platform, wifi_contracts):
    platform, scaling = demo_platform
    return CostModel(platform, wifi_contracts, scaling)
