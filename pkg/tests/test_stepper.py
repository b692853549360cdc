import numpy as np
import pytest

from trilap import (
    ConfigError,
    Field,
    Grid,
    LinearReaction,
    PolynomialReaction,
    ReactionOverflowError,
    RunConfig,
    SystemSpec,
    ZeroReaction,
    build_propagator,
    evaluate_reaction,
    forward,
    inverse,
    min_component_value,
    run,
    step_linear,
)

from conftest import pd_diffusion, zero_transport
from oracles import mode_exponential_step, scalar_decay_solution

LOGISTIC = PolynomialReaction((((1.0, (2,)), (-1.0, (1,))),))


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(t_end=1.0, dt=2.0)
    with pytest.raises(ConfigError):
        RunConfig(t_end=1.0, dt=0.3)
    with pytest.raises(ConfigError):
        RunConfig(t_end=1.0, dt=0.1, output_stride=0)
    assert RunConfig(t_end=1.0, dt=0.125).n_steps == 8


def test_single_harmonic_decay(scalar_heat_spec, grid1d):
    k = 2 * np.pi * 2 / grid1d.box
    x = grid1d.axis_coords
    u = Field(grid1d, np.cos(k * x)[None])
    dt = 0.01
    prop = build_propagator(scalar_heat_spec, grid1d, dt)
    out = inverse(step_linear(forward(u), prop))
    assert np.abs(out.values - np.exp(-(k**6) * dt) * u.values).max() < 1e-12


def test_zero_dt_propagator_is_identity_step(scalar_heat_spec, grid1d, rng):
    u = Field(grid1d, rng.standard_normal((1, 64)))
    prop = build_propagator(scalar_heat_spec, grid1d, 0.0)
    out = inverse(step_linear(forward(u), prop))
    assert np.abs(out.values - u.values).max() < 1e-13


def test_linear_step_matches_eigendecomposition_oracle(rng):
    grid = Grid(d=1, n=64, box=16.0)
    spec = SystemSpec(1, 2, pd_diffusion(rng, 2), (rng.uniform(-1, 1, (2, 2)),),
                      LinearReaction(rng.uniform(-1, 1, (2, 2))))
    u0 = Field(grid, rng.standard_normal((2, 64)))
    dt = 1e-4
    ts = run(spec, u0, RunConfig(t_end=dt, dt=dt))
    oracle = mode_exponential_step(spec, grid, u0.values, dt, include_linear_reaction=True)
    assert np.abs(ts.final_state.values - oracle).max() < 1e-10


def test_evaluate_reaction_examples(grid1d):
    u = Field(grid1d, np.ones((2, 64)))
    assert np.array_equal(evaluate_reaction(u, ZeroReaction()).values, np.zeros((2, 64)))
    lin = LinearReaction([[2.0, -1.0], [-1.0, 2.0]])
    assert np.allclose(evaluate_reaction(u, lin).values, 1.0)
    zero = Field(grid1d, np.zeros((1, 64)))
    assert np.array_equal(evaluate_reaction(zero, LOGISTIC).values, np.zeros((1, 64)))


def test_evaluate_reaction_overflow(grid1d):
    u = Field(grid1d, np.full((1, 64), 10.0))
    blowy = PolynomialReaction((((1.0, (400,)),),))
    with pytest.raises(ReactionOverflowError):
        evaluate_reaction(u, blowy)


def test_mass_conserved_without_reaction(rng):
    grid = Grid(d=1, n=32, box=16.0)
    spec = SystemSpec(1, 2, pd_diffusion(rng, 2), (rng.uniform(-1, 1, (2, 2)),))
    u0 = Field(grid, rng.standard_normal((2, 32)) + 2.0)
    ts = run(spec, u0, RunConfig(t_end=0.1, dt=0.001, output_stride=1))
    mass = ts.diagnostics[:, :, 2]
    assert np.abs(mass - mass[0]).max() <= 1e-10 * np.abs(mass[0]).max()


def test_energy_decay_symmetric_transport(rng):
    grid = Grid(d=1, n=32, box=16.0)
    sym = rng.uniform(-1, 1, (2, 2))
    spec = SystemSpec(1, 2, pd_diffusion(rng, 2), ((sym + sym.T) / 2,))
    u0 = Field(grid, rng.standard_normal((2, 32)))
    ts = run(spec, u0, RunConfig(t_end=0.05, dt=5e-4, output_stride=1))
    l2 = np.sqrt((ts.diagnostics[:, :, 3] ** 2).sum(axis=1))
    assert np.all(np.diff(l2) <= 1e-12)


def test_constant_data_matches_homogeneous_ode():
    grid = Grid(d=1, n=8, box=32.0)
    spec = SystemSpec(1, 1, [[1.0]], zero_transport(1, 1), LOGISTIC)
    u0 = Field(grid, np.full((1, 8), 0.7))
    dt = 1.0 / 64.0
    ts = run(spec, u0, RunConfig(t_end=1.0, dt=dt, output_stride=1))
    # classical RK4 on u' = u - u^2, written out independently
    y = 0.7
    for step, t in enumerate(ts.times[:-1]):
        rhs = lambda v: v - v * v
        k1 = rhs(y)
        k2 = rhs(y + dt / 2 * k1)
        k3 = rhs(y + dt / 2 * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        assert abs(ts.diagnostics[step + 1, 0, 0] - y) < 1e-8


def test_gaussian_develops_negative_minimum(scalar_heat_spec):
    grid = Grid(d=1, n=256, box=32.0)
    x = grid.axis_coords
    u0 = Field(grid, np.exp(-0.5 * (x / 0.8) ** 2)[None])
    assert min_component_value(u0, 0).value >= 0.0
    t_end = 0.1
    ts = run(scalar_heat_spec, u0, RunConfig(t_end=t_end, dt=t_end / 8, output_stride=1))
    assert min_component_value(ts.final_state, 0).value < -1e-3
    oracle = scalar_decay_solution(grid, u0.values[0], t_end)
    assert np.abs(ts.final_state.values[0] - oracle).max() < 1e-10


def test_rk4_observed_order():
    grid = Grid(d=1, n=32, box=64.0)
    x = grid.axis_coords
    u0 = Field(grid, (0.4 + 0.2 * np.exp(-0.5 * (x / 4) ** 2))[None])
    spec = SystemSpec(1, 1, [[0.5]], zero_transport(1, 1), LOGISTIC)
    t_end = 0.8
    ref = run(spec, u0, RunConfig(t_end=t_end, dt=t_end / 640, output_stride=640)).final_state.values
    errs = []
    for steps in (10, 20, 40):
        st = run(spec, u0, RunConfig(t_end=t_end, dt=t_end / steps, output_stride=steps))
        errs.append(np.abs(st.final_state.values - ref).max())
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.7


def test_determinism_bit_identical(rng):
    grid = Grid(d=1, n=32, box=16.0)
    spec = SystemSpec(1, 1, [[1.0]], zero_transport(1, 1), LOGISTIC)
    u0 = Field(grid, (0.5 + 0.1 * np.cos(2 * np.pi * grid.axis_coords / 16.0))[None])
    rc = RunConfig(t_end=0.25, dt=1 / 128, output_stride=4)
    a = run(spec, u0, rc)
    b = run(spec, u0, rc)
    assert np.array_equal(a.diagnostics, b.diagnostics)
    assert a.to_csv() == b.to_csv()


def test_blowup_flagged_with_partial_series():
    grid = Grid(d=1, n=16, box=16.0)
    # F = -u^2 so du/dt = +u^2: finite-time blow-up from positive data
    spec = SystemSpec(1, 1, [[1.0]], zero_transport(1, 1),
                      PolynomialReaction((((-1.0, (2,)),),)))
    u0 = Field(grid, np.full((1, 16), 2.0))
    ts = run(spec, u0, RunConfig(t_end=2.0, dt=1 / 64, output_stride=1))
    assert ts.blown_up and ts.blowup_step is not None
    assert ts.final_t < 2.0
    assert np.all(np.isfinite(ts.final_state.values))
    assert len(ts.times) == len(ts.diagnostics)


def test_suggest_dt_respects_exp_budget(scalar_heat_spec):
    from trilap import suggest_dt

    grid = Grid(d=1, n=256, box=8.0)
    dt = suggest_dt(scalar_heat_spec, grid, t_end=1.0)
    assert grid.k_sixth.max() * dt <= 700.0
    steps = 1.0 / dt
    assert abs(steps - round(steps)) < 1e-9
    # mild grids take the whole horizon in one exact step
    coarse = Grid(d=1, n=16, box=64.0)
    assert suggest_dt(scalar_heat_spec, coarse, t_end=0.5) == 0.5


def test_dealias_mask_layout():
    g = Grid(d=1, n=32, box=8.0)
    m = np.abs(np.fft.fftfreq(32) * 32)
    assert np.array_equal(g.dealias_mask, m < 32 / 3)
    assert g.dealias_mask[0]


def test_timeseries_csv_and_state_dump(tmp_path, scalar_heat_spec):
    grid = Grid(d=1, n=16, box=16.0)
    u0 = Field(grid, np.exp(-0.5 * grid.axis_coords**2)[None])
    ts = run(scalar_heat_spec, u0, RunConfig(t_end=0.02, dt=0.01, output_stride=1))
    csv = ts.to_csv()
    assert csv.splitlines()[0] == "t,component,min,argmin_index,mass,l2norm"
    assert len(csv.splitlines()) == 1 + len(ts.times)
    # plain parseable numbers, exact round trip
    first = csv.splitlines()[1].split(",")
    assert float(first[0]) == 0.0 and "np." not in csv
    assert float(first[2]) == ts.diagnostics[0, 0, 0]
    path = tmp_path / "state.npz"
    ts.save_final_state(path)
    data = np.load(path)
    assert np.array_equal(data["values"], ts.final_state.values)
    assert float(data["t"]) == ts.final_t
    assert int(data["n"]) == 16 and float(data["box"]) == 16.0
