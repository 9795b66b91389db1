import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from replicable_online.algorithms import (FLLB, FTPL, FTPLB, BlockSchedule, FTPLBStar,
                                          ParameterClampWarning, btl, btpl, fllb, fllb_params,
                                          ftpl, ftplb, ftplbs, ftplbs_params)
from replicable_online.core import ActionSet, regret_of_actions
from replicable_online.randomness import RandomnessBundle, sample_geometric, sample_uniform_box

mpmath.mp.dps = 50


# -- independent references ---------------------------------------------------

def ref_ftplb(costs, eps, B, bundle, points):
    n = costs.shape[1]
    c0 = sample_uniform_box(bundle.fork("c0"), n, 1 / eps).tolist()
    cum, out, a = [0.0] * n, [], None
    for t in range(1, len(costs) + 1):
        if (t - 1) % B == 0:
            scores = [sum(p[i] * (cum[i] + c0[i]) for i in range(n)) for p in points]
            a = min(range(len(points)), key=lambda k: (scores[k], k))
        out.append(a)
        cum = [cum[i] + costs[t - 1][i] for i in range(n)]
    return out


def ref_fllb(costs, eps, B, bundle, points):
    n = costs.shape[1]
    h = 1 / eps
    off = sample_uniform_box(bundle.fork("grid"), n, h).tolist()
    cum, out, a = [0.0] * n, [], None
    for t in range(1, len(costs) + 1):
        if (t - 1) % B == 0:
            g = []
            for o, x in zip(off, cum):
                z = math.floor((x - o) / h)
                cands = [o + h * k for k in range(z - 1, z + 3) if x <= o + h * k < x + h]
                g.append(cands[0])
            scores = [sum(p[i] * g[i] for i in range(n)) for p in points]
            a = min(range(len(points)), key=lambda k: (scores[k], k))
        out.append(a)
        cum = [cum[i] + costs[t - 1][i] for i in range(n)]
    return out


def ref_ftplbs(costs, eps, B, bundle):
    n = costs.shape[1]
    X = sample_geometric(bundle.fork("noise"), eps, size=n).tolist()
    cum, out, a = [0.0] * n, [], None
    for t in range(1, len(costs) + 1):
        if (t - 1) % B == 0:
            a = min(range(n), key=lambda k: (cum[k] - X[k], k))
        out.append(a)
        cum = [cum[i] + costs[t - 1][i] for i in range(n)]
    return out


def changes_only_at_transitions(actions, B):
    return all(actions[t] == actions[t - 1] for t in range(1, len(actions)) if t % B != 0)


# -- schedule -----------------------------------------------------------------

class TestBlockSchedule:
    def test_transitions(self):
        assert BlockSchedule(3).transitions(7).tolist() == [1, 4, 7]

    @given(st.integers(1, 20), st.integers(1, 200))
    def test_one_transition_per_window(self, B, start):
        s = BlockSchedule(B)
        assert sum(s.is_transition(t) for t in range(start, start + B)) == 1

    def test_invalid(self):
        with pytest.raises(ValueError):
            BlockSchedule(0)


# -- FTPL ---------------------------------------------------------------------

class TestFTPL:
    def test_first_action_from_c0(self):
        learner = FTPL(ActionSet.experts(2), 1.0, RandomnessBundle(0))
        learner.c0 = np.array([0.2, 0.9])
        assert learner.act() == 0

    def test_constant_on_zero_costs(self):
        acts = ftpl(ActionSet.simplex_vertices(3), 0.1, RandomnessBundle(1)).run(np.zeros((10, 3)))
        assert len(set(acts.tolist())) == 1

    def test_hand_replay(self):
        costs = np.array([[1, 0], [0, 1], [1, 0], [1, 0], [0, 1], [0, 1]], float) / 2
        for seed in range(20):
            b = RandomnessBundle(seed)
            acts = FTPL(ActionSet.simplex_vertices(2), 0.5, b)._run_steps(costs)
            assert acts.tolist() == ref_ftplb(costs, 0.5, 1, b, np.eye(2).tolist())

    def test_domain(self):
        with pytest.raises(ValueError):
            FTPL(ActionSet.experts(2), 0.0, RandomnessBundle(0))


# -- FTPLB --------------------------------------------------------------------

class TestFTPLB:
    def test_b1_equals_ftpl(self, rng):
        acts = ActionSet.simplex_vertices(3)
        for i in range(100):
            c = rng.random((30, 3)) / 3
            b = RandomnessBundle(i)
            assert np.array_equal(ftplb(acts, 0.2, 1, b).run(c), ftpl(acts, 0.2, b).run(c))

    def test_b_equals_t_fixed(self, rng):
        c = rng.random((40, 2)) / 2
        acts = ftplb(ActionSet.simplex_vertices(2), 0.1, 40, RandomnessBundle(3)).run(c)
        assert len(set(acts.tolist())) == 1

    def test_points_hand_replay(self, rng):
        pts = rng.normal(size=(4, 3))
        c = rng.random((25, 3)) / 3
        b = RandomnessBundle(8)
        got = ftplb(ActionSet.finite_points(pts), 0.3, 4, b).run(c)
        assert got.tolist() == ref_ftplb(c, 0.3, 4, b, pts.tolist())


# -- FLLB ---------------------------------------------------------------------

class TestFLLB:
    def test_zero_costs_constant(self):
        p = fllb_params(10**6, 3, 0.5)
        acts = fllb(ActionSet.simplex_vertices(3), p, RandomnessBundle(0)).run(np.zeros((500, 3)))
        assert len(set(acts.tolist())) == 1

    def test_hand_replay(self, rng):
        for seed in range(30):
            c = rng.random((6, 2)) / 2
            b = RandomnessBundle(seed)
            got = FLLB(ActionSet.simplex_vertices(2), 0.8, 2, b)._run_steps(c)
            assert got.tolist() == ref_fllb(c, 0.8, 2, b, np.eye(2).tolist())

    def test_transitions_at_1_4_7(self, rng, monkeypatch):
        import replicable_online.algorithms as mod
        learner = FLLB(ActionSet.simplex_vertices(2), 2.0, 3, RandomnessBundle(0))
        decided = []

        def spy(grid, c):
            decided.append(learner.t + 1)
            return mod.__dict__["_orig_round"](grid, c)

        monkeypatch.setitem(mod.__dict__, "_orig_round", mod.round_to_grid)
        monkeypatch.setattr(mod, "round_to_grid", spy)
        learner._run_steps(rng.random((7, 2)) / 2)
        assert decided == [1, 4, 7]


# -- FTPLB* -------------------------------------------------------------------

class TestFTPLBStar:
    def test_noise_pins_first_expert(self):
        learner = FTPLBStar(2, 0.5, 1, RandomnessBundle(0))
        learner.noise = np.array([5, 1])
        assert learner._run_steps(np.zeros((20, 2))).tolist() == [0] * 20

    def test_hand_replay_b1(self, rng):
        for seed in range(30):
            c = rng.random((10, 3))
            b = RandomnessBundle(seed)
            got = ftplbs(3, 0.3, 1, b).run(c)
            assert got.tolist() == ref_ftplbs(c, 0.3, 1, b)

    def test_eps_one_is_blocked_ftl(self, rng):
        c = rng.random((12, 3))
        got = ftplbs(3, 1.0, 3, RandomnessBundle(4)).run(c)
        cum = np.vstack([np.zeros(3), np.cumsum(c, axis=0)])
        expect = [int(np.argmin(cum[3 * (t // 3)])) for t in range(12)]
        assert got.tolist() == expect

    def test_domain(self):
        with pytest.raises(ValueError):
            FTPLBStar(2, 1.5, 1, RandomnessBundle(0))


# -- shared properties --------------------------------------------------------

cost_arrays = hnp.arrays(np.float64, st.tuples(st.integers(1, 40), st.just(3)),
                         elements=st.floats(0, 1 / 3))


@given(cost_arrays, st.integers(1, 8), st.integers(0, 2**32), st.sampled_from(["ftpl", "ftplb", "fllb", "ftplbs"]))
def test_batch_equals_stepwise_and_lazy(costs, B, seed, name):
    acts = ActionSet.simplex_vertices(3)
    b = RandomnessBundle(seed)
    make = {"ftpl": lambda: FTPL(acts, 0.3, b), "ftplb": lambda: FTPLB(acts, 0.3, B, b),
            "fllb": lambda: FLLB(acts, 0.3, B, b), "ftplbs": lambda: FTPLBStar(3, 0.3, B, b)}[name]
    batch, steps = make().run(costs), make()._run_steps(costs)
    assert np.array_equal(batch, steps)
    assert changes_only_at_transitions(batch.tolist(), 1 if name == "ftpl" else B)
    # determinism
    assert np.array_equal(batch, make().run(costs))


def test_causality(rng):
    # changing future costs never changes earlier actions
    c1 = rng.random((30, 3)) / 3
    c2 = c1.copy()
    c2[15:] = rng.random((15, 3)) / 3
    for make in (lambda b: FTPL(ActionSet.simplex_vertices(3), 0.2, b),
                 lambda b: FLLB(ActionSet.simplex_vertices(3), 0.2, 4, b),
                 lambda b: FTPLBStar(3, 0.2, 4, b)):
        a1, a2 = make(RandomnessBundle(5)).run(c1), make(RandomnessBundle(5)).run(c2)
        assert np.array_equal(a1[:16], a2[:16])


def test_resume_after_partial_steps(rng):
    c = rng.random((20, 2)) / 2
    full = FLLB(ActionSet.simplex_vertices(2), 0.5, 3, RandomnessBundle(2)).run(c)
    learner = FLLB(ActionSet.simplex_vertices(2), 0.5, 3, RandomnessBundle(2))
    head = learner._run_steps(c[:7])
    assert np.array_equal(np.concatenate([head, learner.run(c[7:])]), full)


def test_observe_shape():
    learner = FTPL(ActionSet.experts(2), 0.5, RandomnessBundle(0))
    with pytest.raises(ValueError, match="shape"):
        learner.observe([0.1, 0.2, 0.3])


# -- oracles ------------------------------------------------------------------

class TestOracles:
    def test_btl_nonpositive(self, rng):
        for i in range(50):
            n = int(rng.integers(2, 4))
            c = rng.random((int(rng.integers(1, 30)), n))
            assert regret_of_actions(btl(c, ActionSet.experts(n)), c, ActionSet.experts(n)).regret <= 1e-9

    def test_btl_zero_sequence(self):
        acts = btl(np.zeros((5, 3)), ActionSet.experts(3))
        assert acts.tolist() == [0] * 5

    def test_btpl_includes_current_step(self):
        c = np.array([[1.0, 0.0]])
        assert btpl(c, ActionSet.experts(2), [0.0, 0.5]).tolist() == [1]


# -- parameters ---------------------------------------------------------------

def mp_fllb_B(T, n, rho):
    T, n, rho = mpmath.mpf(T), mpmath.mpf(n), mpmath.mpf(rho)
    return mpmath.ceil((2 * (mpmath.sqrt(2 * mpmath.log(2 * T / rho)) + 2) * mpmath.sqrt(n) * T / rho) ** (mpmath.mpf(2) / 3))


def mp_ftplbs_B(T, n, rho):
    T, n, rho = mpmath.mpf(T), mpmath.mpf(n), mpmath.mpf(rho)
    inner = mpmath.sqrt(2 * (mpmath.log(8 * T / rho) / mpmath.log(n) + 1))
    return mpmath.ceil((8 * inner * mpmath.log(n) * T / rho) ** (mpmath.mpf(2) / 3))


class TestParams:
    @pytest.mark.parametrize("T,n,rho", [(10**4, 2, 0.1), (10**6, 5, 0.3), (10**7, 2, 0.5)])
    def test_fllb_high_precision(self, T, n, rho):
        expect = int(mp_fllb_B(T, n, rho))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterClampWarning)
            p = fllb_params(T, n, rho)
        assert p.B == min(expect, T)
        assert p.eps == pytest.approx(1 / math.sqrt(p.B * T), rel=1e-15)

    @pytest.mark.parametrize("T,n,rho", [(10**7, 2, 0.1), (10**8, 8, 0.3), (10**5, 3, 0.2)])
    def test_ftplbs_high_precision(self, T, n, rho):
        expect = int(mp_ftplbs_B(T, n, rho))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterClampWarning)
            p = ftplbs_params(T, n, rho)
        assert p.B == min(expect, T)
        assert p.eps == pytest.approx(math.sqrt(math.log(n) / (p.B * T)), rel=1e-15)

    def test_unclamped_value(self):
        p = fllb_params(10**6, 2, 0.1)
        assert not p.clamped and p.B == int(mp_fllb_B(10**6, 2, 0.1)) and p.B < 10**6

    def test_monotone_in_rho(self):
        assert fllb_params(10**7, 2, 0.01).B > fllb_params(10**7, 2, 0.1).B
        assert ftplbs_params(10**8, 2, 0.01).B > ftplbs_params(10**8, 2, 0.1).B

    def test_clamp_warns(self):
        with pytest.warns(ParameterClampWarning):
            p = fllb_params(100, 2, 0.1)
        assert p.B == 100 and p.clamped

    @pytest.mark.parametrize("rho", [0.0, 1.0, -0.5, 2.0])
    def test_domain(self, rho):
        with pytest.raises(ValueError, match="domain"):
            fllb_params(1000, 2, rho)
        with pytest.raises(ValueError, match="domain"):
            ftplbs_params(1000, 2, rho)
