import math

import numpy as np
import pytest

from sgsem.analysis import (
    ConvergenceRecord,
    Sign,
    SolutionMismatchError,
    classify,
    convergence_study,
    error_norms,
    evaluate_solution,
    export_field,
    format_convergence_table,
    interpolate_to_grid,
    log_slope,
    read_field,
    write_convergence_csv,
)
from sgsem.discretization import DiscreteSolution, tensor_operators
from sgsem.eigen import DomainError, RectDomain, eigen_group
from sgsem.lgl import differentiation_matrix, lagrange_basis_matrix, lgl_nodes_weights
from sgsem.newton import newton_solve
from sgsem.nonlinearity import cubic
from sgsem.seeds import enumerate_cubic_seeds, seed_to_nodal

SQ = RectDomain()


def cubic_solution(lam, label, N):
    seed = next(s for s in enumerate_cubic_seeds(eigen_group(lam)) if s.label == label)
    return newton_solve(seed_to_nodal(seed, N), tensor_operators(N, SQ), cubic(), seed_label=label)


@pytest.fixture(scope="module")
def u11_40():
    return cubic_solution(2, "u_{11}", 40)


def downsample(sol, N):
    lgl = lgl_nodes_weights(sol.N)
    L = lagrange_basis_matrix(lgl, lgl_nodes_weights(N).nodes)
    V = L @ sol.full_grid() @ L.T
    return DiscreteSolution(V[1:-1, 1:-1], N, sol.domain, sol.nonlinearity, sol.seed_label)


def test_identical_solutions_have_zero_error(u11_40):
    assert error_norms(u11_40, u11_40) == (0.0, 0.0)


def test_mismatched_domains(u11_40):
    other = DiscreteSolution(np.zeros((5, 5)), 6, RectDomain(0, 1, 0, 1), {}, "")
    with pytest.raises(SolutionMismatchError):
        error_norms(other, u11_40)


def test_norms_agree_with_fine_gauss_quadrature(u11_40):
    ref = u11_40
    coarse = downsample(ref, 16)
    l2, h1 = error_norms(coarse, ref)
    # independent evaluation: Gauss rule with twice the reference node count
    g, w = np.polynomial.legendre.leggauss(2 * (ref.N + 1))
    s = math.pi / 2
    W = np.outer(w, w) * s * s
    diff = interpolate_to_grid(coarse, ref.N) - ref.full_grid()
    L = lagrange_basis_matrix(lgl_nodes_weights(ref.N), g)
    D = differentiation_matrix(lgl_nodes_weights(ref.N)) / s
    e = L @ diff @ L.T
    ex = L @ (D @ diff) @ L.T
    ey = L @ (diff @ D.T) @ L.T
    l2_g = math.sqrt(np.sum(W * e**2))
    h1_g = math.sqrt(np.sum(W * (e**2 + ex**2 + ey**2)))
    assert l2 == pytest.approx(l2_g, rel=1e-10)
    assert h1 == pytest.approx(h1_g, rel=1e-10)
    assert h1 > l2 > 0


def test_table_one_l2_at_order_16(u11_40):
    # the order-40 solution is already a good reference at this accuracy
    sol = cubic_solution(2, "u_{11}", 16)
    l2, _ = error_norms(sol, u11_40)
    assert l2 == pytest.approx(7.8021e-5, rel=0.05)


def test_convergence_study_guards():
    seed = enumerate_cubic_seeds(eigen_group(2))[0]
    with pytest.raises(ValueError):
        convergence_study(seed, [], 20, cubic())
    with pytest.raises(ValueError):
        convergence_study(seed, [20], 20, cubic())


def test_convergence_study_small(tmp_path):
    seed = enumerate_cubic_seeds(eigen_group(2))[0]
    recs = convergence_study(seed, [8, 12, 16], 30, cubic())
    assert [r.N for r in recs] == [8, 12, 16]
    assert all(r.converged and r.reference_N == 30 for r in recs)
    l2 = [r.l2_error for r in recs]
    assert l2[0] > l2[1] > l2[2] > 0
    assert log_slope(recs) < -0.25
    path = write_convergence_csv(recs, tmp_path / "c.csv")
    assert path.read_text().splitlines()[0] == "N,l2,h1,converged"
    table = format_convergence_table(recs)
    assert table.splitlines()[0].split() == ["N", "8", "12", "16"]


def test_failed_record_and_floor_note():
    recs = [ConvergenceRecord(8, 1e-3, 1e-2, "u", 100),
            ConvergenceRecord(48, 1e-14, 1e-13, "u", 100),
            ConvergenceRecord(56, math.nan, math.nan, "u", 100, converged=False)]
    text = format_convergence_table(recs)
    assert "failed" in text and "rounding floor" in text
    assert recs[1].at_floor and not recs[0].at_floor


def test_classify_u11(u11_40):
    c = classify(u11_40)
    assert c.sign is Sign.POSITIVE and c.num_peaks == 1
    assert c.max_abs == pytest.approx(np.abs(u11_40.U).max())


def test_classify_u22():
    c = classify(cubic_solution(8, "u_{22}", 24))
    assert c.sign is Sign.SIGN_CHANGING and c.num_peaks == 4


def test_classify_zero():
    c = classify(np.zeros((7, 7)))
    assert c.max_abs == 0 and c.num_peaks == 0


def test_classify_sign_map(u11_40):
    c, d = classify(u11_40.U), classify(-u11_40.U)
    assert d.sign is Sign.NEGATIVE and d.num_peaks == c.num_peaks
    s = cubic_solution(5, "u_{12+21}", 20)
    assert classify(-s.U).sign is classify(s.U).sign is Sign.SIGN_CHANGING
    assert classify(-s.U).num_peaks == classify(s.U).num_peaks


def test_evaluate_outside(u11_40):
    with pytest.raises(DomainError):
        evaluate_solution(u11_40, [4.0], [1.0])


def test_export_round_trip(u11_40, tmp_path):
    path = export_field(u11_40, 9, tmp_path / "f.csv")
    meta, data = read_field(path)
    assert meta["N"] == "40" and meta["seed_label"] == "u_{11}"
    assert float(meta["residual_norm"]) == pytest.approx(u11_40.residual_norm, rel=1e-6)
    assert data.shape == (81, 3)
    np.testing.assert_allclose(data[:, 2], evaluate_solution(u11_40, data[:, 0], data[:, 1]), atol=1e-12)
    corners = (np.isin(data[:, 0], [0, math.pi])) & (np.isin(data[:, 1], [0, math.pi]))
    assert corners.sum() == 4
    np.testing.assert_array_equal(data[corners, 2], 0)


def test_export_zero_and_guards(tmp_path):
    sol = DiscreteSolution(np.zeros((5, 5)), 6, SQ, {}, "zero")
    _, data = read_field(export_field(sol, 4, tmp_path / "z.csv"))
    np.testing.assert_array_equal(data[:, 2], 0)
    with pytest.raises(ValueError):
        export_field(sol, 1, tmp_path / "bad.csv")
    with pytest.raises(OSError):
        export_field(sol, 4, tmp_path / "missing" / "dir" / "z.csv")
