import numpy as np
import pytest
from scipy.linalg import expm

from autodiff import Tape, Tensor, grad_check, sum_
from conftest import small_config
from errors import NumericAbortError, ValidationError
from gncde import (
    ModelConfig,
    agc_adjacency,
    agc_layer,
    build_control_path,
    count_params,
    derivatives,
    forward,
    forward_batch,
    informed_contraction,
    init_params,
    init_states,
    integrate,
    outer_matrix,
    parameter_shapes,
    solve,
    vector_field_f,
    vector_field_g,
    vertex_mixing_matrix,
)
from topology import A_V4, A_V10
from training import mae_loss

IN_NEIGHBOURS_G4 = {0: {0, 3}, 1: {0, 1}, 2: {1, 2}, 3: {1, 2, 3}}


def window(batch: int = 2, length: int = 25, n_vertices: int = 4, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    t = np.arange(length)[None, :, None]
    phase = rng.uniform(0, 2 * np.pi, size=(batch, 1, n_vertices))
    return 1.0 + np.sin(0.3 * t + phase)


def natural_spline_oracle(y: np.ndarray, t: float) -> float:
    """Natural cubic spline on unit knots from a dense solve for the second derivatives."""
    n = len(y) - 1
    system = np.zeros((n + 1, n + 1))
    rhs = np.zeros(n + 1)
    system[0, 0] = system[n, n] = 1.0
    for i in range(1, n):
        system[i, i - 1:i + 2] = [1.0, 4.0, 1.0]
        rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1])
    m = np.linalg.solve(system, rhs)
    i = min(int(np.floor(t)), n - 1)
    s = t - i
    return (
        (1 - s) * y[i] + s * y[i + 1]
        + ((1 - s) ** 3 - (1 - s)) * m[i] / 6.0
        + (s ** 3 - s) * m[i + 1] / 6.0
    )


class TestMixingMatrix:
    def test_default_is_transpose_plus_identity(self):
        np.testing.assert_array_equal(vertex_mixing_matrix(A_V4), A_V4.T + np.eye(4))

    def test_forms(self):
        binary = vertex_mixing_matrix(A_V4, form="binary", orientation="out", self_loop=False)
        np.testing.assert_array_equal(binary, (A_V4 > 0).astype(float))
        symmetric = vertex_mixing_matrix(A_V10, form="symmetric", self_loop=False)
        np.testing.assert_array_equal(symmetric, symmetric.T)

    def test_unknown_form(self):
        with pytest.raises(ValidationError, match="form"):
            vertex_mixing_matrix(A_V4, form="laplacian")


class TestModelConfig:
    def test_informed_needs_matrix(self):
        with pytest.raises(ValidationError, match="a_inner"):
            ModelConfig(n_vertices=4, inner_mech="informed")

    def test_matrix_without_informed(self):
        with pytest.raises(ValidationError, match="a_outer"):
            ModelConfig(n_vertices=4, a_outer=np.eye(4))

    def test_layers(self):
        with pytest.raises(ValidationError, match="n_layers"):
            ModelConfig(n_vertices=4, n_layers=4)

    def test_with_mechanisms_builds_matrices(self):
        config = ModelConfig(n_vertices=4).with_mechanisms("agc", "informed", A_V4)
        np.testing.assert_array_equal(config.outer_matrix, A_V4.T + np.eye(4))
        assert config.a_inner is None


class TestControlPath:
    @pytest.mark.parametrize("scheme", ["cubic", "linear"])
    def test_constant_observations(self, scheme):
        path = build_control_path(np.full((25, 3), 2.5), scheme)
        for t in (0.0, 3.3, 12.0, 24.0):
            np.testing.assert_allclose(path.derivative(t)[0], np.tile([1.0, 0.0], (3, 1)), atol=1e-12)

    @pytest.mark.parametrize("scheme", ["cubic", "linear"])
    def test_linear_ramp(self, scheme):
        ramp = np.outer(np.arange(25.0), [0.5, -2.0])
        path = build_control_path(ramp, scheme)
        np.testing.assert_allclose(path.derivative(7.5)[0], [[1.0, 0.5], [1.0, -2.0]], atol=1e-10)

    def test_passes_through_knots(self):
        data = window(batch=3)
        path = build_control_path(data, "cubic")
        for k in range(25):
            np.testing.assert_allclose(path.value(float(k))[..., 1], data[:, k], atol=1e-10)
            np.testing.assert_allclose(path.value(float(k))[..., 0], k)

    def test_natural_spline_matches_dense_solve(self):
        y = np.random.default_rng(3).normal(size=25)
        path = build_control_path(y[:, None], "cubic")
        for t in (0.25, 5.5, 17.8, 23.9):
            assert path.value(t)[0, 0, 1] == pytest.approx(natural_spline_oracle(y, t), abs=1e-10)

    def test_cubic_derivative_continuous_at_knots(self):
        path = build_control_path(window(batch=1), "cubic")
        left = path.derivative(10.0 - 1e-9)
        right = path.derivative(10.0 + 1e-9)
        np.testing.assert_allclose(left, right, atol=1e-7)

    def test_rejects_nan(self):
        data = window(batch=1)
        data[0, 3, 1] = np.nan
        with pytest.raises(ValidationError, match="NaN"):
            build_control_path(data)


class TestVectorFields:
    def test_shared_weights_give_equal_slices(self):
        config = small_config()
        params = init_params(config, seed=1)
        row = np.random.default_rng(0).normal(size=config.d_h)
        out = vector_field_f(config, params, Tensor(np.tile(row, (1, 4, 1)))).data
        for node in range(1, 4):
            np.testing.assert_array_equal(out[0, node], out[0, 0])

    def test_zero_state_zero_biases_gives_zero_g(self):
        config = small_config(inner="informed")
        params = init_params(config, seed=1)
        for name, p in params.items():
            if name.startswith("g.") and name.endswith(".bias"):
                p.data[:] = 0.0
        out = vector_field_g(config, params, Tensor(np.zeros((1, 4, config.d_z)))).data
        assert not out.any()

    def test_inner_identity_matrix_collapses(self):
        plain = small_config()
        informed = ModelConfig(**{**plain.to_dict(), "inner_mech": "informed", "a_inner": np.eye(4)})
        params = init_params(plain, seed=2)
        state = Tensor(np.random.default_rng(1).normal(size=(2, 4, plain.d_z)))
        a = vector_field_g(plain, params, state).data
        b = vector_field_g(informed, params, state).data
        assert a.tobytes() == b.tobytes()

    def test_inner_informed_locality(self):
        config = small_config(inner="informed")
        params = init_params(config, seed=3)
        state = np.random.default_rng(2).normal(size=(1, 4, config.d_z))
        base = vector_field_g(config, params, Tensor(state)).data
        for source in range(4):
            moved = state.copy()
            moved[0, source] += 1.0
            out = vector_field_g(config, params, Tensor(moved)).data
            for node in range(4):
                if source not in IN_NEIGHBOURS_G4[node]:
                    np.testing.assert_array_equal(out[0, node], base[0, node])
                else:
                    assert not np.array_equal(out[0, node], base[0, node])


class TestAGC:
    def test_zero_embedding_mean_pools(self):
        rng = np.random.default_rng(0)
        x, w, b = rng.normal(size=(1, 4, 3)), rng.normal(size=(3, 2)), rng.normal(size=2)
        out = agc_layer(Tensor(np.zeros((4, 2))), Tensor(x), Tensor(w), Tensor(b)).data
        expected = (x + x.mean(axis=1, keepdims=True)) @ w + b
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_single_vertex(self):
        rng = np.random.default_rng(1)
        x, w, b = rng.normal(size=(1, 1, 3)), rng.normal(size=(3, 2)), rng.normal(size=2)
        out = agc_layer(Tensor(rng.normal(size=(1, 2))), Tensor(x), Tensor(w), Tensor(b)).data
        np.testing.assert_allclose(out, 2.0 * x @ w + b, rtol=1e-12)

    def test_rows_sum_to_one(self):
        adjacency = agc_adjacency(Tensor(np.random.default_rng(2).normal(size=(6, 3)))).data
        np.testing.assert_allclose(adjacency.sum(axis=1), np.ones(6), atol=1e-12)


class TestOuterContraction:
    def test_zero_matrix(self):
        rng = np.random.default_rng(0)
        field, dh = rng.normal(size=(2, 4, 3, 5)), rng.normal(size=(2, 4, 5))
        out = informed_contraction(Tensor(field), Tensor(np.zeros((4, 4))), Tensor(dh)).data
        assert not out.any()

    def test_identity_matrix_is_plain_coupling(self):
        rng = np.random.default_rng(1)
        field, dh = Tensor(rng.normal(size=(2, 4, 3, 5))), Tensor(rng.normal(size=(2, 4, 5)))
        plain = informed_contraction(field, None, dh).data
        informed = informed_contraction(field, Tensor(np.eye(4)), dh).data
        np.testing.assert_array_equal(plain, informed)

    def test_nested_loop_reference(self):
        rng = np.random.default_rng(2)
        field, matrix, dh = rng.normal(size=(2, 4, 3, 5)), rng.normal(size=(4, 4)), rng.normal(size=(2, 4, 5))
        out = informed_contraction(Tensor(field), Tensor(matrix), Tensor(dh)).data
        expected = np.zeros((2, 4, 3))
        for b in range(2):
            for k in range(4):
                for z in range(3):
                    for h in range(5):
                        for m in range(4):
                            expected[b, k, z] += field[b, k, z, h] * matrix[k, m] * dh[b, m, h]
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-12)

    def test_outer_informed_locality(self):
        config = small_config(outer="informed")
        params = init_params(config, seed=4)
        rng = np.random.default_rng(3)
        hidden = Tensor(rng.normal(size=(1, 4, config.d_h)))
        state = Tensor(rng.normal(size=(1, 4, config.d_z)))
        control = rng.normal(size=(1, 4, 2))
        matrix = outer_matrix(config)
        _, base = derivatives(config, params, hidden, state, Tensor(control), matrix=matrix)
        moved = control.copy()
        moved[0, 2] += 1.0
        _, out = derivatives(config, params, hidden, state, Tensor(moved), matrix=matrix)
        for node in range(4):
            if 2 not in IN_NEIGHBOURS_G4[node]:
                np.testing.assert_array_equal(out.data[0, node], base.data[0, node])


class TestInitialStates:
    def test_zero_maps(self):
        config = small_config()
        params = init_params(config, seed=0)
        for name in ("init_h.weight", "init_h.bias", "init_z.weight", "init_z.bias"):
            params[name].data[:] = 0.0
        hidden, state = init_states(config, params, np.ones((1, 4, 2)))
        assert not hidden.data.any() and not state.data.any()

    def test_equal_rows(self):
        config = small_config()
        params = init_params(config, seed=0)
        x0 = np.array([[[0.0, 1.5], [0.0, 1.5], [0.0, -2.0], [0.0, 1.5]]])
        hidden, state = init_states(config, params, x0)
        np.testing.assert_array_equal(hidden.data[0, 0], hidden.data[0, 1])
        np.testing.assert_array_equal(state.data[0, 0], state.data[0, 3])

    def test_gradient_reaches_initial_maps(self):
        config = small_config(input_length=5, horizon=2)
        params = init_params(config, seed=0)
        with Tape():
            loss = sum_(forward_batch(config, params, window(batch=1, length=5)))
        loss.backward()
        for name in ("init_h.weight", "init_z.weight"):
            assert np.any(params[name].grad != 0)


class TestIntegration:
    def test_zero_fields_keep_initial_state(self):
        config = small_config()
        params = init_params(config, seed=0)
        for name, p in params.items():
            if name.startswith("f."):
                p.data[:] = 0.0
        control = build_control_path(window())
        hidden, state = solve(config, params, control)
        h0, z0 = init_states(config, params, control.value(0.0))
        np.testing.assert_array_equal(hidden.data, h0.data)
        np.testing.assert_array_equal(state.data, z0.data)

    def test_fourth_order_convergence(self):
        data = window(batch=1, seed=5)
        control = build_control_path(data)
        results = []
        for substeps in (2, 4, 8):
            config = small_config(substeps=substeps, d_h=4, d_z=4)
            results.append(integrate(config, init_params(config, seed=6), control).data)
        ratio = np.linalg.norm(results[0] - results[1]) / np.linalg.norm(results[1] - results[2])
        assert 11.3 < ratio < 22.0  # observed order at least 3.5

    def test_constant_control_matches_closed_form(self):
        config = small_config(activation="identity", interpolation="linear", substeps=4, d_h=3, d_z=2)
        params = init_params(config, seed=8)
        for name in ("f.2.weight", "f.2.bias"):
            params[name].data *= 0.05
        for name, p in params.items():
            if name.startswith("g.") and name != "g.2.bias":
                p.data[:] = 0.0

        data = np.tile(np.array([0.5, 1.0, -0.3, 2.0]), (1, 25, 1))
        control = build_control_path(data, "linear")
        hidden, state = solve(config, params, control)

        f = [params[f"f.{i}.{kind}"].data for i in range(3) for kind in ("weight", "bias")]
        w_total = f[0] @ f[2] @ f[4]
        c_total = f[1] @ f[2] @ f[4] + f[3] @ f[4] + f[5]
        a, c = w_total[:, ::2].T, c_total[::2]
        coupling = params["g.2.bias"].data.reshape(config.d_z, config.d_h)

        augmented = np.zeros((config.d_h + 1, config.d_h + 1))
        augmented[:-1, :-1], augmented[:-1, -1] = a, c
        propagator = expm(24.0 * augmented)
        h0, z0 = init_states(config, params, control.value(0.0))
        for node in range(4):
            h_end = propagator[:-1, :-1] @ h0.data[0, node] + propagator[:-1, -1]
            z_end = z0.data[0, node] + coupling @ (h_end - h0.data[0, node])
            np.testing.assert_allclose(hidden.data[0, node], h_end, rtol=1e-6, atol=1e-9)
            np.testing.assert_allclose(state.data[0, node], z_end, rtol=1e-6, atol=1e-9)

    def test_non_finite_state_aborts(self):
        config = small_config()
        params = init_params(config, seed=0)
        params["init_h.bias"].data[:] = np.inf
        with pytest.raises(NumericAbortError, match="step=1"):
            integrate(config, params, build_control_path(window()))


class TestForward:
    def test_deterministic(self):
        config = small_config(inner="agc", outer="informed")
        params = init_params(config, seed=0)
        sample = window(batch=1)[0]
        assert forward(config, params, sample).data.tobytes() == forward(config, params, sample).data.tobytes()

    def test_zero_readout_gives_bias(self):
        config = small_config()
        params = init_params(config, seed=0)
        params["readout.weight"].data[:] = 0.0
        prediction = forward(config, params, window(batch=1)[0]).data
        assert prediction.shape == (24, 4)
        for node in range(4):
            np.testing.assert_array_equal(prediction[:, node], params["readout.bias"].data)

    def test_outer_identity_matrix_collapses(self):
        plain = small_config()
        informed = ModelConfig(**{**plain.to_dict(), "outer_mech": "informed", "a_outer": np.eye(4)})
        params = init_params(plain, seed=3)
        data = window()
        a = forward_batch(plain, params, data).data
        b = forward_batch(informed, params, data).data
        assert a.tobytes() == b.tobytes()

    def test_batch_matches_single(self):
        config = small_config(inner="informed", outer="informed")
        params = init_params(config, seed=1)
        data = window(batch=3)
        batch = forward_batch(config, params, data).data
        for b in range(3):
            np.testing.assert_allclose(forward(config, params, data[b]).data, batch[b], rtol=1e-12, atol=1e-14)

    def test_wrong_window_shape(self):
        config = small_config()
        with pytest.raises(ValidationError, match="windows"):
            forward_batch(config, init_params(config, 0), np.zeros((1, 20, 4)))


class TestParameterCount:
    def test_matches_enumeration(self):
        for inner in ("identity", "informed", "agc"):
            config = small_config(inner=inner)
            params = init_params(config, seed=0)
            assert count_params(config) == sum(p.size for p in params.values())
            assert [name for name, _ in parameter_shapes(config)] == list(params)

    def test_outer_mechanism_adds_nothing(self):
        for inner in ("identity", "informed", "agc"):
            assert count_params(small_config(inner=inner)) == count_params(small_config(inner=inner, outer="informed"))

    def test_agc_adds_embedding(self):
        identity, agc = small_config(), small_config(inner="agc")
        assert count_params(agc) - count_params(identity) == 4 * agc.agc_embed_dim
        assert count_params(small_config(10, inner="agc")) - count_params(agc) == 6 * agc.agc_embed_dim

    def test_shared_weights_across_variants(self):
        a = init_params(small_config(), seed=5)
        b = init_params(small_config(inner="agc"), seed=5)
        for name in a:
            np.testing.assert_array_equal(a[name].data, b[name].data)


@pytest.mark.slow
@pytest.mark.parametrize(
    "inner,outer",
    [("identity", "identity"), ("informed", "informed"), ("agc", "informed")],
)
def test_gradients_match_finite_differences(inner, outer):
    config = small_config(inner=inner, outer=outer, d_h=4, d_z=4, substeps=2)
    assert (config.input_length, config.horizon) == (25, 24)
    params = init_params(config, seed=11)
    data = window(batch=2)
    target = np.random.default_rng(12).normal(size=(2, 24, 4))

    def loss():
        return mae_loss(forward_batch(config, params, data), target)

    assert grad_check(loss, params) < 1e-4
