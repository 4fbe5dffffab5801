import pytest

from rejsamp.graphs import GraphFamily


@pytest.fixture(params=list(GraphFamily), ids=lambda f: f.value)
def family(request):
    return request.param
