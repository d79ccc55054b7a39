import os
from pathlib import Path

import pytest

import rosa

FIXTURES = Path(os.environ.get("ROSA_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))
PROJECT = FIXTURES / "fictibot_ws" / "project.yaml"


def test_analyse_fixture():
    report = rosa.analyse(PROJECT)
    assert report["project"] == "Fictibot"
    graph = report["graphs"][0]
    assert graph["configuration"] == "multiplex"
    assert {n["name"] for n in graph["nodes"]} == {"/fictibase", "/ficticontrol", "/fictimux"}
    assert report["statistics"]["topics"] == len(graph["topics"]) == 8
    rules = sorted(i["id"] for i in report["issues"] if i["id"].startswith("query:R4"))
    assert rules == ["query:R4:1", "query:R4:2", "query:R4:3"]


def test_skip_builtin_rules():
    assert rosa.analyse(PROJECT, skip=["builtin-rules"])["issues"] == []


def test_missing_project():
    with pytest.raises(rosa.StageError):
        rosa.analyse(FIXTURES / "nowhere.yaml")


def test_dot():
    dot = rosa.export_dot(PROJECT, configuration="multiplex")
    assert dot.startswith('digraph "multiplex"')
    assert dot.count("style=dashed") == 6


def test_properties_and_monitor():
    assert rosa.normalize_property("globally:  /bumper   causes /stop_cmd") == "globally: /bumper causes /stop_cmd"
    with pytest.raises(rosa.ParseError):
        rosa.normalize_property("globally: no bumper")
    prop = "globally: no /bumper {data < 0 or data > 7}"
    assert rosa.monitor(prop, (FIXTURES / "traces" / "out_of_range.jsonl").read_text()) == "false"
    assert rosa.monitor(prop, (FIXTURES / "traces" / "clean.jsonl").read_text()) == "true"
    assert rosa.monitor("globally: /bumper causes /stop_cmd", '{"time": 1, "topic": "/bumper"}\n') == "inconclusive"
    with pytest.raises(rosa.TraceError):
        rosa.monitor(prop, '{"time": 2, "topic": "/a"}\n{"time": 1, "topic": "/a"}\n')
