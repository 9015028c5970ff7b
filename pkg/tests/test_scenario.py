import json

import chz
import pytest

from meshwave import serialise
from meshwave.errors import ParseError, ValidationError
from meshwave.scenario import (
    BUNDLED,
    Mode,
    ScenarioConfig,
    WeightSet,
    bundled_scenario,
    comparable_view,
    infrastructure_summary,
    load_scenario,
    parse_scenario,
    save_scenario,
    validate,
)


def _unchecked(data) -> ScenarioConfig:
    return serialise.structure(ScenarioConfig, data)


def _data(**overrides):
    data = {
        "description": "two routers",
        "mode": "proposed",
        "duration": 60,
        "sample_interval": 1,
        "topology": {
            "nodes": [
                {"id": "e0", "kind": "edge_server"},
                {"id": "b0", "kind": "broker"},
                {"id": "r0", "kind": "mesh_router"},
                {"id": "r1", "kind": "mesh_router"},
                {"id": "u0", "kind": "user_device"},
            ],
            "links": [
                {"endpoints": ["e0", "r0"]},
                {"endpoints": ["e0", "b0"]},
                {"endpoints": ["r0", "r1"], "medium": "wireless"},
                {"endpoints": ["u0", "r1"], "medium": "wireless", "capacity_mbps": 50},
            ],
        },
        "cluster": {"size": 1, "replication_factor": 1},
    }
    data.update(overrides)
    return data


def test_parse_scenario():
    config = parse_scenario(_data())
    assert config.mode is Mode.PROPOSED
    assert config.n_steps == 60
    assert config.spectrum.alpha_s == 0.12
    assert validate(config) == []

    summary = infrastructure_summary(config.topology)
    assert (summary.routers, summary.brokers, summary.edge_servers) == (2, 1, 1)
    assert summary.infrastructure == 4
    assert summary.nodes == 5
    assert summary.links == 4


def test_baseline_forces_alpha_to_zero(caplog):
    config = parse_scenario(_data(mode="baseline", spectrum={"alpha_s": 0.12}))
    assert config.spectrum.alpha_s == 0.0
    assert "Baseline mode ignores alpha_s=0.12" in caplog.text

    built = ScenarioConfig(mode=Mode.BASELINE)
    assert built.spectrum.alpha_s == 0.0
    assert chz.replace(built, mode=Mode.PROPOSED).spectrum.alpha_s == 0.12


def test_unknown_key_is_a_parse_error():
    with pytest.raises(ParseError, match=r"unknown key \$\.traffic\.user_rte"):
        parse_scenario(_data(traffic={"user_rte": 1.0}))
    with pytest.raises(ParseError, match=r"unknown key \$\.speed"):
        parse_scenario(_data(speed=3))
    with pytest.raises(ParseError, match=r"'hybrid' is not one of"):
        parse_scenario(_data(mode="hybrid"))


def test_field_ranges_are_validation_errors():
    with pytest.raises(ValidationError, match=r"Expected duration to be greater than 0"):
        parse_scenario(_data(duration=0))
    with pytest.raises(ValidationError, match="alpha_s"):
        parse_scenario(_data(spectrum={"alpha_s": 0.25}))


def test_validate_collects_every_violation():
    data = _data(duration=10.5, weights={"gpi": [0.5, 0.5, 0.5]})
    data["topology"]["nodes"].append({"id": "r0", "kind": "mesh_router"})
    data["topology"]["links"].append({"endpoints": ["r1", "r9"]})
    with pytest.raises(ValidationError) as excinfo:
        parse_scenario(data, "city.json")
    message = str(excinfo.value)
    assert message.startswith("city.json: ")
    assert "gpi weights must sum to 1" in message
    assert "node ids must be unique" in message
    assert "references unknown node 'r9'" in message
    assert "duration must be divisible by sample_interval" in message


def test_validate_topology_rules():
    data = _data()
    data["topology"]["links"] = [{"endpoints": ["e0", "r0"]}, {"endpoints": ["r1", "r1"]}]
    violations = validate(_unchecked(data))
    assert "link r1~r1 must join two distinct nodes" in violations
    assert "infrastructure subgraph must be connected" in violations

    empty = ScenarioConfig()
    assert validate(empty) == ["topology must contain at least one infrastructure node"]


def test_cluster_must_match_brokers():
    config = _unchecked(_data(cluster={"size": 3}))
    assert validate(config) == ["cluster size 3 must match the 1 broker nodes"]


def test_weight_sets():
    WeightSet(cqs=(0.2, 0.2, 0.6))
    with pytest.raises(ValueError, match="non-negative"):
        WeightSet(gpl=(-0.1, 0.5, 0.5))
    config = ScenarioConfig(weights=WeightSet(cqs=(0.5, 0.5, 0.5)))
    assert "cqs weights must sum to 1" in validate(config)


def test_load_and_save(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_data()))
    config = load_scenario(path)
    copy = tmp_path / "copy.json"
    save_scenario(config, copy)
    assert load_scenario(copy) == config

    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "missing.json")


def test_comparable_view_ignores_mode_settings():
    proposed = parse_scenario(_data(seed=1, description="a"))
    baseline = parse_scenario(_data(mode="baseline", seed=2, spectrum={"alpha_s": 0.0}))
    assert comparable_view(proposed) == comparable_view(baseline)
    other = parse_scenario(_data(duration=120))
    assert comparable_view(other) != comparable_view(proposed)


def test_bundled_scenarios_load():
    for name in BUNDLED:
        assert bundled_scenario(name).exists()
    urban = load_scenario(bundled_scenario("urban_proposed"))
    summary = infrastructure_summary(urban.topology)
    assert (summary.routers, summary.brokers, summary.edge_servers) == (50, 5, 3)
    assert summary.nodes == 560
    assert comparable_view(urban) == comparable_view(
        load_scenario(bundled_scenario("urban_baseline"))
    )
    pairs = [("rural_baseline", "rural_proposed"), ("suburban_baseline", "suburban")]
    for baseline, proposed in pairs:
        b = load_scenario(bundled_scenario(baseline))
        p = load_scenario(bundled_scenario(proposed))
        assert (b.mode, p.mode) == (Mode.BASELINE, Mode.PROPOSED)
        assert comparable_view(b) == comparable_view(p)
    assert load_scenario(bundled_scenario("rural_proposed")).spectrum.alpha_s == 0.08
    assert load_scenario(bundled_scenario("suburban")).spectrum.alpha_s == 0.10
    with pytest.raises(FileNotFoundError, match="no bundled scenario"):
        bundled_scenario("lunar")
