import random

import pytest

from abpkit.algebra import PrimeField, SparsePoly


@pytest.fixture(scope="session")
def field():
    return PrimeField(101)


@pytest.fixture(scope="session")
def f7():
    return PrimeField(7)


def make_random_poly(rng: random.Random, field: PrimeField, num_vars: int,
                     max_degree: int, max_terms: int = 8) -> SparsePoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exps = [0] * num_vars
        budget = max_degree
        for i in range(num_vars):
            e = rng.randint(0, budget)
            exps[i] = e
            budget -= e
        terms[tuple(exps)] = rng.randrange(field.p)
    return SparsePoly(field, num_vars, terms)
