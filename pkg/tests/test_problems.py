"""Benchmark front generators, dominance filtering, noise, CSV round trips."""

import numpy as np
import pytest

from bezierabc.problems import (
    NoiseSpec,
    ProblemSpec,
    add_noise,
    _nondominated_mask_large,
    default_front_size,
    med_exponents,
    med_front,
    med_objectives,
    nondominated_filter,
    nondominated_mask,
    parse_problem,
    read_cloud_csv,
    sample_front,
    schaffer_front,
    viennet2_nondominated_grid,
    viennet2_objectives,
    viennet2_front,
    write_cloud_csv,
)


class TestSchaffer:
    def test_endpoint_and_midpoint_values(self):
        # x = 0 -> (0, 4); x = 2 -> (4, 0); x = 1 -> (1, 1)
        x = np.array([0.0, 2.0, 1.0])
        front = np.column_stack([x**2, (x - 2.0) ** 2])
        np.testing.assert_array_equal(front, [[0.0, 4.0], [4.0, 0.0], [1.0, 1.0]])

    def test_front_relation(self):
        front = schaffer_front(500, np.random.default_rng(0))
        f1, f2 = front[:, 0], front[:, 1]
        np.testing.assert_allclose(f2, (np.sqrt(f1) - 2.0) ** 2, atol=1e-10)

    def test_output_nondominated(self):
        front = schaffer_front(200, np.random.default_rng(1))
        assert nondominated_mask(front).all()


class TestMed:
    def test_exponents_dim3(self):
        np.testing.assert_allclose(
            med_exponents(3), [np.exp(-1.0), 1.0, np.exp(1.0)], rtol=1e-12
        )

    def test_unit_vector_zeroes_own_objective(self):
        for dim in (2, 3, 4):
            values = med_objectives(np.eye(dim), dim)
            np.testing.assert_allclose(np.diag(values), 0.0, atol=1e-15)

    def test_dim2_center_hand_value(self):
        values = med_objectives(np.array([[0.5, 0.5]]), 2)
        np.testing.assert_allclose(values[0], 0.5 ** med_exponents(2), rtol=1e-12)

    def test_front_nondominated(self):
        for dim in (2, 3, 5):
            front = med_front(dim, 150, np.random.default_rng(2))
            assert front.shape == (150, dim)
            assert nondominated_mask(front).all()

    def test_no_feasible_point_dominates_the_front(self):
        rng = np.random.default_rng(3)
        for dim in (2, 3):
            front = med_front(dim, 100, rng)
            box = rng.uniform(-5.12, 5.12, size=(10_000, dim))
            box_values = med_objectives(box, dim)
            le_all = (box_values[:, None, :] <= front[None, :, :]).all(axis=2)
            lt_any = (box_values[:, None, :] < front[None, :, :]).any(axis=2)
            assert not (le_all & lt_any).any()


class TestViennet2:
    def test_known_minimum_of_f1(self):
        values = viennet2_objectives(np.array([[2.0, -1.0]]))
        assert values[0, 0] == pytest.approx(3.0, abs=1e-12)

    def test_front_nondominated_by_construction(self):
        front = viennet2_front(60, grid_res=80, rng=np.random.default_rng(4))
        assert front.shape == (60, 3)
        assert nondominated_mask(front).all()

    def test_monotone_refinement(self):
        # a coarse-grid image point that survives filtering against the finer
        # nested grid (121 = 2*61 - 1 nodes, bitwise-nested) must also survive
        # filtering against the coarse grid alone
        axis = np.linspace(-4.0, 4.0, 61)
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        coarse_image = viennet2_objectives(np.column_stack([xx.ravel(), yy.ravel()]))
        coarse_front = {tuple(r) for r in viennet2_nondominated_grid(61).tolist()}
        fine_front = {tuple(r) for r in viennet2_nondominated_grid(121).tolist()}
        fine_survivors = [tuple(r) for r in coarse_image.tolist() if tuple(r) in fine_front]
        assert fine_survivors
        assert all(row in coarse_front for row in fine_survivors)

    def test_count_exceeding_front_rejected(self):
        with pytest.raises(ValueError):
            viennet2_front(10_000_000, grid_res=60, rng=np.random.default_rng(5))

    def test_grid_res_floor(self):
        with pytest.raises(ValueError):
            viennet2_front(10, grid_res=30, rng=np.random.default_rng(6))


class TestNondominatedFilter:
    def test_incomparable_points_kept(self):
        cloud = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(nondominated_filter(cloud), cloud)

    def test_strict_domination_removes(self):
        cloud = np.array([[0.0, 0.0], [1.0, 1.0]])
        np.testing.assert_array_equal(nondominated_filter(cloud), [[0.0, 0.0]])

    def test_duplicates_are_mutually_nondominating(self):
        cloud = np.array([[0.0, 0.0], [0.0, 0.0]])
        np.testing.assert_array_equal(nondominated_filter(cloud), cloud)

    def test_preserves_input_order(self):
        cloud = np.array([[1.0, 0.0], [2.0, 2.0], [0.0, 1.0]])
        np.testing.assert_array_equal(
            nondominated_filter(cloud), [[1.0, 0.0], [0.0, 1.0]]
        )

    def test_idempotent_on_fronts(self):
        front = med_front(3, 120, np.random.default_rng(7))
        np.testing.assert_array_equal(nondominated_filter(front), front)

    def test_fast_mask_matches_quadratic_mask(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(5, 400))
            dim = int(rng.integers(2, 5))
            cloud = rng.normal(size=(n, dim))
            if rng.random() < 0.3:  # inject duplicates
                cloud[rng.integers(n)] = cloud[rng.integers(n)]
            np.testing.assert_array_equal(
                _nondominated_mask_large(cloud), nondominated_mask(cloud)
            )


class TestNoise:
    def test_sigma_zero_is_identity(self):
        cloud = np.random.default_rng(9).normal(size=(20, 3))
        np.testing.assert_array_equal(add_noise(cloud, NoiseSpec(0.0)), cloud)

    def test_noise_scale(self):
        point = np.zeros((1, 2))
        copies = np.repeat(point, 100_000, axis=0)
        noisy = add_noise(copies, NoiseSpec(0.3), np.random.default_rng(10))
        np.testing.assert_allclose(noisy.std(axis=0), 0.3, rtol=0.02)

    def test_seeded_reproducibility(self):
        cloud = np.ones((10, 2))
        a = add_noise(cloud, NoiseSpec(0.5, seed=11))
        b = add_noise(cloud, NoiseSpec(0.5, seed=11))
        np.testing.assert_array_equal(a, b)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)


class TestProblemSpecs:
    def test_parse_variants(self):
        assert parse_problem("schaffer").dim == 2
        assert parse_problem("viennet2").dim == 3
        assert parse_problem("3-med") == ProblemSpec("med", 3)
        assert parse_problem("5-Med").dim == 5
        assert parse_problem("med", med_dim=4).dim == 4

    def test_invalid_names(self):
        with pytest.raises(ValueError):
            parse_problem("zdt1")
        with pytest.raises(ValueError):
            parse_problem("med")  # needs a dimension
        with pytest.raises(ValueError):
            ProblemSpec("schaffer", 3)

    def test_reference_sizes(self):
        assert default_front_size(parse_problem("schaffer")) == 201
        assert default_front_size(parse_problem("3-med")) == 153
        assert default_front_size(parse_problem("viennet2")) == 8122
        assert default_front_size(parse_problem("5-med")) == 4845
        assert default_front_size(parse_problem("4-med")) is None

    def test_sample_front_dispatch(self):
        rng = np.random.default_rng(12)
        assert sample_front(parse_problem("schaffer"), 10, rng).shape == (10, 2)
        assert sample_front(parse_problem("3-med"), 10, rng).shape == (10, 3)
        spec = ProblemSpec("viennet2", 3, grid_res=60)
        assert sample_front(spec, 10, rng).shape == (10, 3)


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        cloud = rng.normal(size=(37, 4)) * 10.0 ** rng.integers(-8, 8, size=(37, 4))
        path = tmp_path / "cloud.csv"
        write_cloud_csv(path, cloud)
        np.testing.assert_array_equal(read_cloud_csv(path), cloud)

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,2.0\n")
        with pytest.raises(ValueError):
            read_cloud_csv(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f1,f2\n1.0\n")
        with pytest.raises(ValueError):
            read_cloud_csv(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("f1,f2\n")
        with pytest.raises(ValueError):
            read_cloud_csv(path)
