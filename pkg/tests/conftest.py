import pytest

from hypodb.project import Project

import helpers


@pytest.fixture
def project(tmp_path):
    """A freshly initialized, empty project."""
    return Project.init(str(tmp_path / "study"))


@pytest.fixture
def seeded(project):
    """Project with both phenomena and all three hypotheses registered."""
    helpers.seed_catalog(project)
    return project


@pytest.fixture
def introduced(seeded):
    """Seeded project with all ten trials loaded and worlds built."""
    helpers.load_trials(seeded)
    seeded.u_intro(2)
    return seeded
