"""Edge coverage: wild group rings in the module layer, non-prime base
fields through the full pipeline, error-payload distinctions, and runner
error surfacing."""

import pytest

from tmodlv.ffield import FqField
from tmodlv.fields import TamingModule, trivial_extension
from tmodlv.groups import GroupSpec
from tmodlv.grpring import GroupRing, NotAUnitError, _component_lead, is_monic
from tmodlv.laurent import Laurent
from tmodlv.matrix import Mat
from tmodlv.modsize import FiniteFqGModule, fitting_contains, gsize
from tmodlv.poly import monic_irreducibles, pmul
from tmodlv.runner import run_command
from tmodlv.tmodule import make_carlitz


def test_gsize_over_wild_group_ring():
    # F_2[Z/2] is local non-semisimple; a free module still has a monic size
    F = FqField(2)
    gr = GroupRing(F, GroupSpec((2,)))
    sigma = gr.basis_elem((1,))
    one_plus_sigma = gr.add(gr.one, sigma)  # nilpotent
    theta = Mat(gr, [[one_plus_sigma, gr.one], [gr.zero, sigma]])
    B = FiniteFqGModule(gr, rank=2, theta_t=theta)
    f = gsize(B)
    assert len(f) - 1 == 2
    assert is_monic(Laurent.from_t_poly(gr, f))
    assert fitting_contains(Laurent.from_t_poly(gr, pmul(gr, f, (gr.one, gr.one))), B)
    assert not fitting_contains(Laurent.one(gr), B)


def test_wild_raw_module_without_free_basis_is_rejected():
    F = FqField(2)
    gr = GroupRing(F, GroupSpec((2,)))
    # 1-dimensional raw space: cannot be F_2[Z/2]-free (wrong dimension)
    t_mat = Mat(F, [[F.one]])
    g_mats = {(0,): Mat(F, [[F.one]]), (1,): Mat(F, [[F.one]])}
    B = FiniteFqGModule(gr, t_mat=t_mat, g_mats=g_mats)
    with pytest.raises(ValueError):
        B.to_free()
    with pytest.raises(ValueError):
        gsize(B)


def test_pipeline_over_gf4():
    # non-prime base field: Carlitz theta over GF(4) at small precision
    F = FqField(2, 2, monic_irreducibles(FqField(2), 2)[0])
    X = trivial_extension(F)
    from tmodlv.lvalue import theta0, zeta_sum_oracle

    th = theta0(make_carlitz(F), X, TamingModule(X), 2)
    oracle = zeta_sum_oracle(F, 2)
    gr = X.gr
    lifted = Laurent(gr, oracle.emin, [gr.constant(c) for c in oracle.coeffs], prec=3)
    assert th.value.eq_mod(lifted, 3)


def test_not_a_unit_reasons():
    F = FqField(2)
    gr = GroupRing(F, GroupSpec((2,)))
    tab = gr.chartab()
    sigma = gr.basis_elem((1,))
    nilp = gr.add(gr.one, sigma)
    # exact value, every coefficient nilpotent: certified non-unit
    x = Laurent.monomial(gr, nilp, 0)
    comp = tab.psi_laurent(x)[0]
    with pytest.raises(NotAUnitError) as info:
        _component_lead(tab, comp)
    assert info.value.reason == "non_unit"
    # finite precision, nothing known yet: insufficient precision
    y = Laurent(gr, 2, [nilp], prec=3)
    comp = tab.psi_laurent(y)[0]
    with pytest.raises(NotAUnitError) as info:
        _component_lead(tab, comp)
    assert info.value.reason == "insufficient_precision"


def test_runner_surfaces_cutoff_error_as_exit_2():
    config = "[field]\np = 2\n[tmodule]\nkind = drinfeld\ncoeffs = 1, 1\n[run]\nprecision = 3\n"
    # an absurdly small cutoff cannot be certified for the rank-2 module
    report = run_command("theta0", config, max_prime_degree=1)
    assert report.exit_code == 2
    assert "cutoff" in report.text()


def test_runner_theta_m_and_hmodule():
    config = "[field]\np = 2\n[run]\nprecision = 3\n"
    r = run_command("theta-m", config, m=1)
    assert r.exit_code == 0
    h = run_command("hmodule", config)
    assert h.exit_code == 0
    assert "dim_Fq H(E/M) = 0" in h.text()


def test_runner_expinv():
    config = "[field]\np = 2\n[run]\nprecision = 3\n"
    r = run_command("expinv", config)
    assert r.exit_code == 0
    assert "certified = True" in r.text()


def test_monic_rejects_non_unit_value():
    config = "[field]\np = 2\n[extension]\nkind = trivial\n"
    # over F_2[1], zero is not a unit
    report = run_command("monic", config, value="0")
    assert report.exit_code == 2
