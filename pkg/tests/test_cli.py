"""
Tests for the command-line interface and its exit-code contract.
"""

import pytest
from typer.testing import CliRunner

from app.cli import app
from app.services.laurent import normalize, substitute_power
from app.services.rho_ledger import operator_q
from app.services.seifert import alexander_polynomial, twist

runner = CliRunner()


def run(*args):
    return runner.invoke(app, list(args))


def test_invariants_twist():
    """Test the report for twist(2)."""
    result = run("invariants", "twist(2)")
    assert result.exit_code == 0, result.stderr
    delta = normalize(alexander_polynomial(twist(2))).render()
    assert f"Alexander polynomial: {delta}" in result.stdout
    assert "Arf: 0" in result.stdout
    assert "rho0 interval: [" in result.stdout


def test_invariants_unknot():
    """Test that the unknot is trivial throughout."""
    result = run("invariants", "unknot")
    assert result.exit_code == 0
    assert "Alexander polynomial: 1" in result.stdout
    assert "Arf: 0" in result.stdout
    assert "tau: 0 (exact)" in result.stdout


def test_invariants_cabled_infection():
    """Test Delta of a cable is the pattern polynomial in t^2."""
    result = run("invariants", "cable(infect(Q(3), twist(2)), 2)")
    assert result.exit_code == 0
    expected = normalize(substitute_power(operator_q(3).alexander, 2)).render()
    assert f"Alexander polynomial: {expected}" in result.stdout


def test_invariants_is_deterministic():
    """Test byte-identical output for identical input."""
    first = run("invariants", "sum(twist(2), neg(twist(3)))")
    second = run("invariants", "sum(twist(2), neg(twist(3)))")
    assert first.stdout == second.stdout


def test_invariants_from_seifert_file(tmp_path):
    """Test a Seifert matrix file as input."""
    path = tmp_path / "mine.seifert"
    path.write_text(twist(2).to_text())
    result = run("invariants", "--seifert", str(path))
    assert result.exit_code == 0
    assert "expression: mine" in result.stdout
    assert "Arf: 0" in result.stdout


@pytest.mark.parametrize(
    "args",
    [
        ("invariants", "twist(0)"),
        ("invariants", "cable(twist(2))"),
        ("invariants",),
        ("prime", "2*t^ + 1"),
        ("robust", "--op", "S"),
        ("robust", "--p", "0..2"),
        ("filtration", "unknot", "--facts", "/nonexistent/x.facts"),
    ],
)
def test_input_errors_exit_two(args):
    """Test that malformed input exits with code 2."""
    assert run(*args).exit_code == 2


def test_parse_error_message():
    """Test that parse errors name their column on stderr."""
    result = run("invariants", "mirror(twist(2))")
    assert result.exit_code == 2
    assert "column 1" in result.stderr
    assert result.stdout == ""


def test_prime():
    """Test irreducible and reducible inputs."""
    result = run("prime", "t^2 + 1")
    assert result.exit_code == 0
    assert "status: Irreducible" in result.stdout
    result = run("prime", "t^2 - 1")
    assert result.exit_code == 0
    assert "status: Reducible" in result.stdout
    assert "witness:" in result.stdout


def test_strongly_prime_and_coprime():
    """Test the strong primality and coprimality commands."""
    result = run("strongly-prime", "8*t - 9")
    assert result.exit_code == 0
    assert "status: StronglyPrime" in result.stdout
    result = run("strongly-prime", "t^2 + t + 1")
    assert "status: NotStronglyPrime" in result.stdout
    result = run("strongly-coprime", "t - 2", "2*t - 3")
    assert result.exit_code == 0
    assert "status: StronglyCoprime" in result.stdout


def test_catalan():
    """Test that 3^2 - 2^3 is the only solution in a small box."""
    result = run("catalan", "--x-max", "30", "--y-max", "30", "--a-max", "6", "--b-max", "6")
    assert result.exit_code == 0
    assert "3^2 - 2^3 = 1" in result.stdout
    assert "1 solution(s)" in result.stdout


def test_legendrian_builtin_twist():
    """Test tb = 1 and rot = 0 for the twist-knot front."""
    result = run("legendrian", "--builtin", "twist-front", "--j", "5")
    assert result.exit_code == 0
    assert "tb: 1" in result.stdout
    assert "rot: 0" in result.stdout


def test_legendrian_iterated_q_front():
    """Test exact tau = 1 for an iterated Q-front satellite with genus one."""
    result = run(
        "legendrian", "--builtin", "q-front", "--k", "3",
        "--companion-tb", "0", "--iterate", "2", "--genus", "1",
    )
    assert result.exit_code == 0, result.stderr
    assert "tau: 1 (exact)" in result.stdout


def test_legendrian_file(tmp_path):
    """Test a front file holding the max-tb unknot."""
    path = tmp_path / "unknot.front"
    path.write_text("L1 R1\n")
    result = run("legendrian", str(path))
    assert result.exit_code == 0
    assert "tb: -1" in result.stdout
    assert "rot: 0" in result.stdout


def test_legendrian_companion_must_have_tb_zero():
    """Test the satellite precondition on the companion."""
    result = run(
        "legendrian", "--builtin", "q-front", "--k", "3", "--companion-tb", "1", "--iterate", "1"
    )
    assert result.exit_code == 2
    assert "stabilize companion to tb = 0 first" in result.stderr


def test_robust_q():
    """Test robustness of Q^3 and its cables for p <= 3."""
    result = run("robust", "--op", "Q", "--k", "3", "--p", "1..3")
    assert result.exit_code == 0
    assert result.stdout.count("conclusion: robust") == 3
    assert "[assumed] fos(Q^3, <0>) != 0" in result.stdout


def test_robust_refusals():
    """Test that missing facts or a bad k give a refusal exit code."""
    assert run("robust", "--op", "Q", "--k", "3", "--no-facts").exit_code == 1
    result = run("robust", "--op", "Q", "--k", "2")
    assert result.exit_code == 1
    assert "conclusion: not certified" in result.stdout


def test_robust_json(tmp_path):
    """Test JSON output and a user facts file."""
    path = tmp_path / "q.facts"
    path.write_text('FACT "fos-nonzero Q(3) <0>" CITE "test fixture"\n')
    result = run("robust", "--op", "Q", "--k", "3", "--facts", str(path), "--json")
    assert result.exit_code == 0
    assert '"conclusion": "robust"' in result.stdout
    assert "test fixture" in result.stdout


def test_independence_theorem_a():
    """Test the coprimality matrix and the independence conclusion."""
    result = run("independence", "--family", "thmA", "--k", "1", "--n", "2", "--p", "1..3", "--m", "1")
    assert result.exit_code == 0, result.stdout
    assert "coprimality matrix:" in result.stdout
    matrix = [line for line in result.stdout.splitlines() if " vs p=" in line]
    assert len(matrix) == 3
    assert all("StronglyCoprime" in line for line in matrix)
    assert "conclusion: linearly independent in C/(F_2.5 + B_3)" in result.stdout


def test_independence_cable_family_without_facts():
    """Test that a missing span fact fails the certificate."""
    result = run("independence", "--family", "cable", "--op", "Q", "--k", "3", "--p", "1..2", "--no-facts")
    assert result.exit_code == 1
    assert "[FAILED]" in result.stdout


def test_filtration():
    """Test the filtration levels of an R-infection."""
    result = run("filtration", "infect(R(1, J='neg-trefoils-3'), twist(4))")
    assert result.exit_code == 0
    assert "levels: F_1, P_1, N_0, B_0" in result.stdout


def test_kauffman():
    """Test the suite with and without injected tau facts."""
    assert run("kauffman").exit_code == 0
    result = run("kauffman", "--no-facts")
    assert result.exit_code == 1
    assert "[FAILED] tau(d) = -1" in result.stdout


def test_profile_dump():
    """Test the TSV dump of the signature profile of twist(2)."""
    result = run("profile-dump", "twist(2)")
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "start\tend\tlevel"
    assert len(lines) == 3
    assert lines[1].startswith("0\t")
    assert lines[-1].split("\t")[1] == "1"
