"""
Tests for formal rho values, first-order signature ledgers and operators.
"""

import pytest

from app.services.alexmodule import delta_k
from app.services.facts import FactBook, load_facts
from app.services.laurent import normalize, substitute_power
from app.services.rho_ledger import (
    FOSEntry,
    FOSLedger,
    FOSStatus,
    RhoAtom,
    RhoExpr,
    cable_operator,
    eta_operator,
    operator_by_name,
    operator_q,
    operator_r,
    rho_ledger_infection,
)
from app.utils.constants import DELTA_BAR_SUBMODULE, DELTA_SUBMODULE, ZERO_SUBMODULE
from app.utils.errors import DomainError

J = "neg-trefoils-3"


def rho0(name):
    return RhoExpr.atom(RhoAtom.rho0(name))


def fos(op, label):
    return RhoExpr.atom(RhoAtom.fos(op, label))


def test_rho_expr_arithmetic():
    """Test canonical form, cancellation and rendering."""
    a, b = fos("Q^3", ZERO_SUBMODULE), rho0(J)
    assert a + b == b + a
    assert (a + b - a) == b
    assert (a - a).is_zero
    assert str(RhoExpr.zero()) == "0"
    assert str(a + b) == "fos(Q^3, <0>) + rho0(neg-trefoils-3)"
    assert str(-b) == "-rho0(neg-trefoils-3)"
    assert str(2 * b - a) == "-fos(Q^3, <0>) + 2*rho0(neg-trefoils-3)"
    assert (b + RhoExpr(constant=1)).constant == 1
    assert (a + b).atoms == [RhoAtom.fos("Q^3", ZERO_SUBMODULE), RhoAtom.rho0(J)]


def test_bad_atom_kind():
    """Test that only the two atom kinds exist."""
    with pytest.raises(DomainError):
        RhoAtom("sigma", "x")


def test_operator_q_ledger():
    """Test that both nontrivial submodules of Q^k are ribbon and <0> is formal."""
    op = operator_q(3)
    assert op.ledger.labels == [ZERO_SUBMODULE, DELTA_SUBMODULE, DELTA_BAR_SUBMODULE]
    zero = op.ledger.entry(ZERO_SUBMODULE)
    assert zero.status == FOSStatus.FORMAL
    assert zero.value == fos("Q^3", ZERO_SUBMODULE)
    assert zero.nonzero_fact == "fos-nonzero Q(3) <0>"
    for label in (DELTA_SUBMODULE, DELTA_BAR_SUBMODULE):
        assert op.ledger.entry(label).status == FOSStatus.KNOWN_ZERO
        assert op.submodule(label).ribbon
    assert op.robust_type
    assert op.genus == 1
    assert op.label == "Q(3)"


def test_with_facts_promotes():
    """Test that a matching fact turns a formal entry into a known nonzero one."""
    ledger = operator_q(4).ledger.with_facts(load_facts())
    assert ledger.entry(ZERO_SUBMODULE).status == FOSStatus.KNOWN_NONZERO
    untouched = operator_q(2).ledger.with_facts(load_facts())
    assert untouched.entry(ZERO_SUBMODULE).status == FOSStatus.FORMAL


def test_ledger_requires_ribbon_for_known_zero():
    """Test that KnownZero is tied to ribbon markers."""
    op = operator_q(3)
    zero = op.ledger.entry(ZERO_SUBMODULE)
    forged = FOSEntry(zero.submodule, FOSStatus.KNOWN_ZERO, RhoExpr.zero())
    with pytest.raises(DomainError, match="ribbon marker"):
        FOSLedger((forged,))
    ribbon = op.ledger.entry(DELTA_SUBMODULE)
    with pytest.raises(DomainError):
        FOSLedger((FOSEntry(ribbon.submodule, FOSStatus.FORMAL, rho0(J)),))


@pytest.mark.parametrize("k", [1, 2, 5])
def test_eta_infection(k):
    """Test the infection rule on R^{k,U} along eta with [eta] = delta_k."""
    eta = eta_operator(k)
    assert eta.axis == normalize(delta_k(k))
    assert rho_ledger_infection(eta, J, DELTA_SUBMODULE).is_zero
    name = f"R^{{{k},U}}"
    for label in (ZERO_SUBMODULE, DELTA_BAR_SUBMODULE):
        assert rho_ledger_infection(eta, J, label) == fos(name, label) + rho0(J)


def test_operator_r_ledger():
    """Test that R^{k,J} carries fos(R^{k,U}) + rho0(J) off the ribbon submodule."""
    op = operator_r(2, J)
    assert op.name == "R^{2,neg-trefoils-3}"
    assert op.ledger.entry(DELTA_SUBMODULE).value.is_zero
    zero = op.ledger.entry(ZERO_SUBMODULE)
    assert zero.value == fos("R^{2,U}", ZERO_SUBMODULE) + rho0(J)
    assert zero.nonzero_fact == "rho0-avoids-fos neg-trefoils-3 R(2,U)"
    assert op.label == "R(2, J='neg-trefoils-3')"


def test_infection_along_alpha_adds_rho0():
    """Test that the axis of Q^k and R^{k,J} lies in no proper submodule."""
    op = operator_q(3)
    for P in op.submodules:
        value = rho_ledger_infection(op, "twist(2)", P)
        assert RhoAtom.rho0("twist(2)") in value.atoms
    with pytest.raises(DomainError, match="not a proper submodule"):
        rho_ledger_infection(op, "twist(2)", "<t + 1>")


def test_cable_operator_identity():
    """Test that p = 1 returns the operator itself."""
    op = operator_q(3)
    assert cable_operator(op, 1) is op
    with pytest.raises(DomainError):
        cable_operator(op, 0)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cable_operator_transports_ledger(p):
    """Test that the cable keeps labels, statuses and values."""
    op = operator_q(3)
    cabled = cable_operator(op, p)
    assert cabled.name == f"Q^3_{{{p},1}}"
    assert cabled.alexander == normalize(substitute_power(op.alexander, p))
    assert cabled.module.delta_factor == normalize(substitute_power(delta_k(3), p))
    assert cabled.ledger.labels == op.ledger.labels
    for before, after in zip(op.ledger, cabled.ledger):
        assert (before.status, before.value) == (after.status, after.value)
        assert before.submodule.ribbon == after.submodule.ribbon
    assert cabled.base is op
    assert cabled.fos_name == op.fos_name


def test_cable_of_operator_r_is_robust_type():
    """Test 8t^5 - 9 keeps R^{8,J} cabled with p = 5 of robust type."""
    cabled = cable_operator(operator_r(8, J), 5)
    assert cabled.robust_type
    assert cabled.cable_p == 5
    assert cable_operator(cable_operator(operator_q(3), 2), 3).cable_p == 6


def test_empty_fact_book_leaves_ledger():
    """Test that an empty book promotes nothing."""
    ledger = operator_r(1, J).ledger
    assert ledger.with_facts(FactBook.empty()) == ledger


def test_operator_by_name():
    """Test the command-line lookup of Q and R."""
    assert operator_by_name("Q", 3).name == "Q^3"
    assert operator_by_name("r", 2, "twist(2)").companion_j == "twist(2)"
    with pytest.raises(DomainError, match="unknown operator"):
        operator_by_name("S", 1)
    with pytest.raises(DomainError):
        operator_by_name("Q", 0)
