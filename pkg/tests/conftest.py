import pytest

import fixtures


@pytest.fixture(scope="session")
def survey(tmp_path_factory):
    """Synthetic 40-location / 4-group survey: archive + locations file."""
    root = tmp_path_factory.mktemp("survey")
    archive = root / "archive"
    table, words = fixtures.build_survey_archive(archive)
    locations_csv = root / "locations.csv"
    fixtures.write_survey_locations(table, locations_csv)
    return {
        "archive": archive,
        "locations_csv": locations_csv,
        "table": table,
        "words": words,
        "root": root,
    }
