import json

import pytest

from src.cli import EXIT_GAP_OPEN, EXIT_INVALID, EXIT_OK, main, resolve_instance, sweep_scenarios
from src.formats import instance_digest, load_results, read_bounds_trace, save_instance, save_scenario
from src.network import GeneratorSpec, RoleSpec, default_scenario, generate


@pytest.fixture
def two_depot_files(tmp_path, two_depot_instance, two_depot_scenario):
    instance_path = tmp_path / "two.instance.json"
    scenario_path = tmp_path / "two.scenario.json"
    save_instance(two_depot_instance, instance_path)
    save_scenario(two_depot_scenario, scenario_path)
    return str(instance_path), str(scenario_path)


def stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.mark.unit
def test_sweep_scenarios_product(two_depot_scenario):
    swept = sweep_scenarios(two_depot_scenario, defend=[0, 1], attack=[1, 2])
    assert [s.name for s in swept] == [
        "two_depot-d0o0a1",
        "two_depot-d0o0a2",
        "two_depot-d1o0a1",
        "two_depot-d1o0a2",
    ]
    assert sweep_scenarios(two_depot_scenario) == [two_depot_scenario]


@pytest.mark.unit
def test_generate_and_stats(tmp_path, capsys):
    instance_path = str(tmp_path / "grid.json")
    scenario_path = str(tmp_path / "grid.scenario.json")
    code = main([
        "generate", "--family", "grerec", "--rows", "4", "--cols", "4", "--p", "1", "--q", "0",
        "--roles", "--fuel-fraction", "0.25", "--out", instance_path, "--scenario-out", scenario_path,
    ])
    assert code == EXIT_OK
    assert stdout_json(capsys)["nodes"] == 16

    assert main(["stats", "--instance", instance_path]) == EXIT_OK
    stats = stdout_json(capsys)
    assert stats["undirected_edge_count"] == 24
    assert stats["connected"] is True


@pytest.mark.unit
def test_generate_rejects_bad_grid(tmp_path):
    assert main(["generate", "--family", "grerec", "--rows", "1", "--cols", "4", "--out", str(tmp_path / "x.json")]) == EXIT_INVALID


@pytest.mark.unit
def test_invalid_instance_exit_code(tmp_path, two_depot_files):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["solve", "--instance", str(broken), "--scenario", two_depot_files[1]]) == EXIT_INVALID


@pytest.mark.unit
def test_bench_rejects_descending_sizes():
    assert main(["bench", "--sizes", "100,49"]) == EXIT_INVALID


@pytest.mark.unit
def test_bad_integer_list_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["bench", "--sizes", "a,b"])


@pytest.mark.integration
def test_solve_writes_results(cbc, tmp_path, capsys, two_depot_files):
    out = tmp_path / "out"
    code = main(["solve", "--instance", two_depot_files[0], "--scenario", two_depot_files[1], "--out", str(out)])
    assert code == EXIT_OK
    (row,) = stdout_json(capsys)
    assert row["status"] == "optimal"
    results = load_results(row["results"])
    assert results.objective == pytest.approx(10000.0, rel=1e-6)
    assert [s.node for s in results.defense.defended] == ["d1"]
    assert len(read_bounds_trace(row["trace"])) == results.solver.iterations
    assert (out / "two_depot.dot").exists()


@pytest.mark.integration
def test_solve_budget_sweep(cbc, tmp_path, capsys, two_depot_files):
    out = tmp_path / "sweep"
    code = main([
        "solve", "--instance", two_depot_files[0], "--scenario", two_depot_files[1], "--out", str(out),
        "--sweep-defend", "0,1", "--sweep-attack", "1,2",
    ])
    assert code == EXIT_OK
    rows = stdout_json(capsys)
    assert len(rows) == 4
    assert len(list(out.glob("*.results.json"))) == 4
    objectives = {r["scenario"]: float(r["objective"]) for r in rows}
    assert objectives["two_depot-d1o0a1"] == pytest.approx(10000.0, rel=1e-6)
    assert objectives["two_depot-d0o0a2"] == pytest.approx(40000.0, rel=1e-6)


@pytest.mark.integration
def test_gap_open_exit_code(cbc, tmp_path, capsys, two_depot_instance, two_depot_scenario):
    instance_path = tmp_path / "two.json"
    scenario_path = tmp_path / "capped.json"
    save_instance(two_depot_instance, instance_path)
    save_scenario(two_depot_scenario.model_copy(update={"max_iterations": 1}), scenario_path)
    code = main(["solve", "--instance", str(instance_path), "--scenario", str(scenario_path), "--out", str(tmp_path)])
    assert code == EXIT_GAP_OPEN
    (row,) = stdout_json(capsys)
    assert row["status"] == "gap_open"
    # results are still written
    assert load_results(row["results"]).status == "gap_open"


@pytest.mark.integration
def test_oracle_command(cbc, capsys, two_depot_files):
    assert main(["oracle", "--instance", two_depot_files[0], "--scenario", two_depot_files[1]]) == EXIT_OK
    assert stdout_json(capsys)["value"] == pytest.approx(10000.0, rel=1e-6)


@pytest.mark.unit
def test_oracle_cap_exit_code(two_depot_files):
    assert main(["oracle", "--instance", two_depot_files[0], "--scenario", two_depot_files[1], "--cap", "2"]) == EXIT_INVALID


@pytest.fixture
def generated_scenario(tmp_path):
    """Scenario file whose instance comes from its generator section."""
    spec = GeneratorSpec(
        family="grerec", rows=3, cols=3, p=0.8, q=0.2, seed=4, phases=1,
        roles=RoleSpec(fuel_fraction=0.5, depot_count=2),
    )
    path = tmp_path / "grid.scenario.json"
    save_scenario(default_scenario(generate(spec), seed=4, name="grid"), path, generator=spec)
    return spec, str(path)


@pytest.mark.unit
def test_seed_rebuilds_the_generated_instance(generated_scenario):
    spec, path = generated_scenario
    assert resolve_instance(None, path) == generate(spec)
    assert resolve_instance(None, path, seed=7) == generate(spec.model_copy(update={"seed": 7}))


@pytest.mark.unit
def test_solve_without_instance_needs_a_generator(two_depot_files):
    assert main(["solve", "--scenario", two_depot_files[1], "--seed", "3"]) == EXIT_INVALID


@pytest.mark.integration
def test_solve_generator_backed_scenario(cbc, tmp_path, capsys, generated_scenario):
    spec, path = generated_scenario
    code = main(["solve", "--scenario", path, "--seed", str(spec.seed), "--out", str(tmp_path / "out")])
    assert code == EXIT_OK
    (row,) = stdout_json(capsys)
    assert row["status"] == "optimal"
    assert load_results(row["results"]).instance_sha256 == instance_digest(generate(spec))
