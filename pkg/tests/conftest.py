import pytest

from rsa_cegd.harness import RunConfig, build_world, make_sessions, session_goods

TOY = dict(bits=32, exponent=3, goods_size=48)


def toy_config(seed=0, mode="honest", **overrides):
    params = dict(TOY)
    params.update(overrides)
    return RunConfig(mode=mode, seed=seed, **params)


@pytest.fixture
def toy_world():
    return build_world(toy_config())


def start_session(world, number=1):
    sender, receiver = make_sessions(world, number)
    goods, description = session_goods(world.config, number)
    return sender, receiver, goods, description
