import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cumlab import (CapExceededError, FiniteComponent, ModelError, ProductSpace,
                    TabFn, bernoulli_component, builtin_product_pairs, builtin_sum,
                    builtin_triangle_count, expect, model_from_dict, splice,
                    tabulate, uniform_component)
from conftest import oracle_expect, random_fn, random_space


def binary_space(n, p=0.5):
    return ProductSpace(tuple(bernoulli_component(p) for _ in range(n)))


class TestValidation:
    def test_probs_must_sum_to_one(self):
        with pytest.raises(ModelError):
            FiniteComponent((0.0, 1.0), (0.5, 0.4))

    def test_probs_nonnegative(self):
        with pytest.raises(ModelError):
            FiniteComponent((0.0, 1.0), (1.5, -0.5))

    def test_atoms_nonempty(self):
        with pytest.raises(ModelError):
            FiniteComponent((), ())

    def test_lattice_cap(self):
        comps = tuple(bernoulli_component(0.5) for _ in range(8))
        with pytest.raises(CapExceededError):
            ProductSpace(comps, lattice_cap=100)

    def test_table_length_checked(self):
        sp = binary_space(2)
        with pytest.raises(ModelError):
            TabFn(sp, np.zeros(5))

    def test_table_finite(self):
        sp = binary_space(2)
        with pytest.raises(ModelError):
            TabFn(sp, np.array([0.0, 1.0, np.inf, 0.0]))


class TestSplice:
    def test_empty_override_returns_x(self):
        assert splice((0, 1, 0), (1, 0, 1), 0) == (0, 1, 0)

    def test_full_override_returns_y(self):
        assert splice((0, 1, 0), (1, 0, 1), 0b111) == (1, 0, 1)

    def test_single_coordinate(self):
        # override the middle coordinate only
        assert splice((0, 0, 0), (1, 1, 1), 0b010) == (0, 1, 0)

    def test_dimension_mismatch(self):
        with pytest.raises(ModelError):
            splice((0, 1), (1, 0, 1), 0)

    @given(st.integers(0, 7), st.integers(0, 7))
    @settings(max_examples=64, deadline=None)
    def test_splice_idempotent_on_same_subset(self, xm, ym):
        x = tuple((xm >> j) & 1 for j in range(3))
        y = tuple((ym >> j) & 1 for j in range(3))
        for mask in range(8):
            u = splice(x, y, mask)
            assert splice(u, y, mask) == u


class TestExpect:
    def test_constant(self):
        sp = binary_space(3, p=0.3)
        f = TabFn(sp, np.full(8, 2.5 + 0.5j))
        assert expect(f) == pytest.approx(2.5 + 0.5j, abs=1e-15)

    def test_bernoulli_mean(self):
        sp = ProductSpace((bernoulli_component(0.3),))
        f = TabFn(sp, np.array([0.0, 1.0]))
        assert expect(f) == pytest.approx(0.3, abs=1e-15)

    def test_product_of_two_bernoulli(self):
        # enumeration oracle over all 4 outcomes gives 0.25
        sp = binary_space(2)
        f = builtin_product_pairs(sp)
        assert expect(f) == pytest.approx(0.25, abs=1e-15)

    def test_matches_direct_enumeration(self, rng):
        for _ in range(10):
            space = random_space(rng, int(rng.integers(1, 4)))
            f = random_fn(rng, space)
            assert expect(f) == pytest.approx(oracle_expect(f), abs=1e-12)


class TestBuiltins:
    def test_sum_uses_atom_values(self):
        sp = ProductSpace((uniform_component([-1.0, 1.0]),
                           uniform_component([-1.0, 1.0])))
        f = builtin_sum(sp)
        assert f.at((0, 0)) == -2.0
        assert f.at((1, 0)) == 0.0
        assert f.at((1, 1)) == 2.0

    def test_product_pairs_selected(self):
        sp = binary_space(3)
        f = builtin_product_pairs(sp, pairs=[(0, 1), (1, 2)])
        assert f.at((1, 1, 0)) == 1.0
        assert f.at((1, 1, 1)) == 2.0
        assert f.at((1, 0, 1)) == 0.0

    def test_triangle_count_k4(self):
        # 6 coordinates = edges of K4; the full graph has 4 triangles
        sp = binary_space(6)
        f = builtin_triangle_count(sp)
        assert f.at((1,) * 6) == 4.0
        assert f.at((0,) * 6) == 0.0
        # triangle on vertices {0,1,2}: edges (0,1), (0,2), (1,2)
        assert f.at((1, 1, 0, 1, 0, 0)) == 1.0

    def test_triangle_count_requires_edge_count(self):
        with pytest.raises(ModelError):
            builtin_triangle_count(binary_space(5))


class TestModelJson:
    def test_table_model(self):
        data = {
            "components": [{"atoms": [0, 1], "probs": [0.5, 0.5]}] * 2,
            "function": {"kind": "table", "re": [0, 0, 0, 1], "im": [0, 0, 0, 0]},
        }
        f = model_from_dict(data)
        assert expect(f) == pytest.approx(0.25)

    def test_builtin_model(self):
        data = {
            "components": [{"atoms": [0, 1], "probs": [0.7, 0.3]}] * 3,
            "function": {"kind": "builtin", "name": "sum", "params": {}},
        }
        f = model_from_dict(data)
        assert expect(f) == pytest.approx(0.9)

    def test_unknown_builtin_rejected(self):
        data = {
            "components": [{"atoms": [0, 1], "probs": [0.5, 0.5]}],
            "function": {"kind": "builtin", "name": "nope"},
        }
        with pytest.raises(ModelError):
            model_from_dict(data)

    def test_missing_components_rejected(self):
        with pytest.raises(ModelError):
            model_from_dict({"function": {"kind": "builtin", "name": "sum"}})

    def test_bad_table_length_rejected(self):
        data = {
            "components": [{"atoms": [0, 1], "probs": [0.5, 0.5]}] * 2,
            "function": {"kind": "table", "re": [1, 2, 3]},
        }
        with pytest.raises(ModelError):
            model_from_dict(data)


def test_tabulate_row_major_order():
    sp = ProductSpace((uniform_component([0.0, 1.0]),
                       uniform_component([0.0, 1.0, 2.0])))
    f = tabulate(sp, lambda idx: idx[0] * 10 + idx[1])
    # last coordinate varies fastest
    assert list(f.values.real) == [0, 1, 2, 10, 11, 12]
