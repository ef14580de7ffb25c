import numpy as np
from concurrent.futures import ThreadPoolExecutor

from nomacsk.rng import seed_stream, stream_key


def test_same_inputs_same_stream():
    a = seed_stream(42, ("ber", 10.0, 3)).random(100)
    b = seed_stream(42, ("ber", 10.0, 3)).random(100)
    assert np.array_equal(a, b)


def test_distinct_ids_do_not_collide():
    ids = [("ber", s, c) for s in (0.0, 6.0, 12.0) for c in range(20)] + [("dataset",), ("eve-train", 0.0)]
    draws = [seed_stream(7, i).random(100) for i in ids]
    allvals = np.concatenate(draws)
    assert len(np.unique(allvals)) == allvals.size
    assert not np.array_equal(seed_stream(1, "x").random(100), seed_stream(2, "x").random(100))


def test_order_independent():
    ids = [("chunk", c) for c in range(16)]
    serial = [seed_stream(3, i).random(4) for i in ids]
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(lambda i: seed_stream(3, i).random(4), reversed(ids)))
    for a, b in zip(serial, reversed(threaded)):
        assert np.array_equal(a, b)


def test_key_layout():
    k = stream_key(2 ** 40 + 5, "id")
    assert k[0] == 5 and k[1] == 2 ** 8 and len(k) == 10
