# conftest.py
import random

import pytest

from models.automata import WordAutomaton
from models.formula import BOT, TOP, Formula, atom, box, conj, diamond, disj, mu, neg, nu, var

SEED = 20240611

# (formula, satisfiable, most specific fragment)
CORPUS = [
    ("p", True, "limit-linear"),
    ("p & ~p", False, "limit-linear"),
    ("mu X. p | <>X", True, "limit-linear"),
    ("mu X. p | []X", True, "limit-linear"),
    ("mu X. <>X", False, "limit-linear"),
    ("mu X. []X", False, "limit-linear"),
    ("nu X. <>X", True, "limit-linear"),
    ("nu X. p & []X", True, "limit-linear"),
    ("(nu X. p & []X) & <>~p", False, "limit-linear"),
    ("<><>(p & ~p)", False, "limit-linear"),
    ("[]false", False, "limit-linear"),
    ("[]p & <>~p", False, "limit-linear"),
    ("(mu X. q | (p & <>X)) & (nu Z. ~q & []Z)", False, "limit-linear"),
    ("mu X. p | <>X | []X", True, "alternation-free aconjunctive"),
    ("(mu X. <>X | []X) & []p", False, "alternation-free aconjunctive"),
    ("mu X. p | (<>X & []X)", True, "alternation-free"),
    ("(mu X. (<>X & <>X) | q) & (nu Z. ~q & []Z)", False, "alternation-free"),
    ("nu X. mu Y. (p & <>X) | <>Y", True, "aconjunctive"),
    ("(nu X. mu Y. (p & <>X) | <>Y) & (nu Z. ~p & []Z)", False, "aconjunctive"),
    # CTL: EG, EU, AU, AG, AF and their contradictions
    ("nu X. p & <>X", True, "limit-linear"),
    ("mu X. q | (p & <>X)", True, "limit-linear"),
    ("mu X. q | (p & []X)", True, "limit-linear"),
    ("(mu X. q | (p & []X)) & (nu Z. ~q & []Z)", False, "limit-linear"),
    ("(nu X. p & []X) & (mu Y. ~p | <>Y)", False, "limit-linear"),
    ("(nu X. p & []X) & (mu Y. ~p | []Y)", False, "limit-linear"),
    ("(mu X. p | []X) & (nu Y. ~p & <>Y)", False, "limit-linear"),
    ("(nu X. p & <>X) & []~p", False, "limit-linear"),
    ("nu X. (p | q) & []X", True, "limit-linear"),
    ("mu X. (p & q) | <>X", True, "limit-linear"),
    ("<>p & <>~p", True, "limit-linear"),
    ("nu X. <>X & []X", True, "limit-linear"),
    ("mu X. p | <>(q & <>X)", True, "limit-linear"),
    ("<>(nu X. p & []X) & [](mu Y. ~p | <>Y)", False, "limit-linear"),
    # nested fixpoints without alternation: AG AF, AG EF, EF AU
    ("nu Y. (mu X. p | []X) & []Y", True, "limit-linear"),
    ("(nu Y. (mu X. p | []X) & []Y) & <>(nu Z. ~p & <>Z)", False, "limit-linear"),
    ("mu X. (mu Y. q | (p & []Y)) | <>X", True, "limit-linear"),
    ("(mu X. (mu Y. q | (p & []Y)) | <>X) & (nu Z. ~q & []Z)", False, "limit-linear"),
    ("nu Y. (~p | (mu X. q | []X)) & []Y", True, "limit-linear"),
    ("nu X. q & <>(mu Y. p | <>Y) & []X", True, "limit-linear"),
    ("mu X. (p & <>X) | (q & []X) | (p & q)", True, "alternation-free aconjunctive"),
    ("mu X. <>X | <>(p & X)", False, "alternation-free aconjunctive"),
    ("(mu X. p | <>X | []X) & (nu Z. ~p & []Z)", False, "alternation-free aconjunctive"),
    ("nu Y. (mu X. p | <>X | []X) & []Y", True, "alternation-free aconjunctive"),
    ("(nu Y. (mu X. p | <>X | []X) & []Y) & (nu Z. ~p & []Z)", False, "alternation-free aconjunctive"),
    ("mu X. q | (p & <>X & []X)", True, "alternation-free"),
    ("(mu X. q | (p & <>X & []X)) & (nu Z. ~q & []Z)", False, "alternation-free"),
    ("mu X. <>X & []X", False, "alternation-free"),
    ("nu Y. (mu X. p | (<>X & []X)) & <>Y", True, "alternation-free"),
    # alternating: AGF, EFG and GF through an until
    ("nu X. mu Y. (p & []X) | []Y", True, "aconjunctive"),
    ("(nu X. mu Y. (p & []X) | []Y) & (nu Z. ~p & []Z)", False, "aconjunctive"),
    ("mu X. nu Y. (p & <>Y) | <>X", True, "aconjunctive"),
    ("(mu X. nu Y. (p & <>Y) | <>X) & (nu Z. ~p & []Z)", False, "aconjunctive"),
    ("nu X. mu Y. (q & <>X) | (p & <>Y)", True, "aconjunctive"),
]

# nu-binders that close over a mu-variable put both conjuncts on one odd cycle
ALTERNATING_CONJUNCTIONS = [
    "mu X0. nu X1. <>(X1 & X0)",
    "mu X0. nu X1. [](((~p | X0) | (q & X0)) & ((X1 | p) | X1))",
    "mu X. nu Z. <>X & <>Z",
]

UNRESTRICTED = "nu Z. mu Y. (<>Y & <>Y) | (p & <>Z)"


def random_formula(rng: random.Random, depth: int, atoms=("p", "q"), variables=(), guarded=()) -> Formula:
    """Closed guarded formula; variables lists the binders in scope, guarded those already below a modality"""
    leaves = [TOP, BOT] + [atom(a) for a in atoms] + [neg(a) for a in atoms] + [var(x) for x in guarded]
    if depth <= 0:
        return rng.choice(leaves)
    choice = rng.random()
    if choice < 0.15:
        return rng.choice(leaves)
    if choice < 0.35:
        return conj(random_formula(rng, depth - 1, atoms, variables, guarded),
                    random_formula(rng, depth - 1, atoms, variables, guarded))
    if choice < 0.55:
        return disj(random_formula(rng, depth - 1, atoms, variables, guarded),
                    random_formula(rng, depth - 1, atoms, variables, guarded))
    if choice < 0.75:
        make = diamond if rng.random() < 0.5 else box
        return make(random_formula(rng, depth - 1, atoms, variables, tuple(variables)))
    name = f"X{len(variables)}"
    make = mu if rng.random() < 0.5 else nu
    return make(name, random_formula(rng, depth - 1, atoms, variables + (name,), guarded))


def random_cobuchi(rng: random.Random, states: int = 4, alphabet=("a", "b"), density: float = 0.3) -> WordAutomaton:
    edges = [(f"s{i}", letter, f"s{j}") for i in range(states) for letter in alphabet for j in range(states)
             if rng.random() < density]
    accepting = {f"s{i}" for i in range(states) if rng.random() < 0.5}
    return WordAutomaton.cobuchi(edges, "s0", accepting, alphabet=alphabet, states=[f"s{i}" for i in range(states)])


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def circle_example():
    """Limit-linear co-Buchi automaton with one accepting cycle y-u"""
    edges = [("x", "a", "y"), ("x", "a", "z"), ("y", "b", "u"), ("u", "a", "y"), ("z", "b", "z")]
    return WordAutomaton.cobuchi(edges, "x", {"y", "u"}, alphabet=("a", "b"))


@pytest.fixture
def mh_example():
    edges = [("x", "a", "y"), ("x", "b", "y"), ("x", "a", "z"), ("y", "a", "y"), ("y", "a", "z"), ("y", "b", "z"),
             ("z", "a", "y"), ("z", "b", "z")]
    return WordAutomaton.cobuchi(edges, "x", {"z"}, alphabet=("a", "b"))


@pytest.fixture
def perm_example():
    """Limit-deterministic Buchi automaton; x is the only nondeterministic state"""
    edges = [("x", "a", "x"), ("x", "a", "y"), ("x", "a", "z"), ("y", "a", "y"), ("y", "b", "u"), ("z", "a", "z"),
             ("z", "b", "z"), ("z", "a", "u"), ("z", "b", "u"), ("u", "a", "y")]
    return WordAutomaton.buchi(edges, "x", {"u"}, alphabet=("a", "b"))


@pytest.fixture
def focus_example():
    edges = [("x", "a", "x"), ("x", "b", "x"), ("x", "a", "y"), ("y", "a", "x"), ("x", "a", "z"), ("y", "b", "y"),
             ("z", "b", "y"), ("z", "a", "z")]
    return WordAutomaton.cobuchi(edges, "x", {"y", "z"}, alphabet=("a", "b"))
