import pytest

from dibkit import BinomialRaw, from_raw_binomial, standardized_two_sample


@pytest.fixture(scope="session")
def prams():
    """The infant-mortality worked example: WI current sample, US external."""
    raw, (cur, ext) = from_raw_binomial(BinomialRaw(37, 94), BinomialRaw(7680, 20_000))
    return {
        "raw": raw,
        "cur": cur,
        "ext": ext,
        "st": standardized_two_sample(cur, ext),
        "theta0": 1.0 / 3.0,
        "theta0_st": (1.0 / 3.0) / cur.sd,
    }
