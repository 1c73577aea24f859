#!/usr/bin/env python3
"""Writes fixtures/ingest_100.json and the facts it must map to.

Entity Q(1000+i), i = 1..100, carries:
  every i      P31 human (1 reference), P21 female if i%5==0 else male
  i%10 == 1    P22 somevalue
  i%10 == 2    P40 novalue
  i%10 == 3    P569 deprecated 1900 and preferred 1950 (year precision)
  i%10 == 4    P26 spouse Q(1000+i+1) with P580 day and P276 Q90 (2 references)
  i%20 == 5    P27 with a malformed entity datavalue
  i%25 == 6    P39 Q30185 with P580 novalue and P582 2010
  i%10 == 7    P108 Q95 with P582 somevalue
  i%10 == 8    P1082 quantity 1200 [1150, 1250] with P585 2015
  i%10 == 9    P625 coordinates 52.5, 13.5 precision 0.5
  i%10 == 0    P1448 "Name i"@en and P856 <https://example.org/i>
"""

import json
import pathlib

GREGORIAN = "http://www.wikidata.org/entity/Q1985727"
ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def item(qid):
    return {"type": "wikibase-entityid", "value": {"entity-type": "item", "id": qid, "numeric-id": int(qid[1:])}}


def snak(prop, datatype, datavalue=None, snaktype="value"):
    s = {"snaktype": snaktype, "property": prop, "datatype": datatype}
    if datavalue is not None:
        s["datavalue"] = datavalue
    return s


def time_dv(ts, precision):
    return {"type": "time", "value": {"time": ts, "timezone": 0, "before": 0, "after": 0,
                                      "precision": precision, "calendarmodel": GREGORIAN}}


def statement(main, rank="normal", qualifiers=None, references=0):
    st = {"mainsnak": main, "type": "statement", "rank": rank}
    if qualifiers:
        st["qualifiers"] = {}
        for q in qualifiers:
            st["qualifiers"].setdefault(q["property"], []).append(q)
    if references:
        st["references"] = [{"hash": f"r{k}", "snaks": {"P143": [snak("P143", "wikibase-item", item("Q328"))]}}
                            for k in range(references)]
    return st


def time_json(main, earliest, latest):
    return {"type": "time", "main": main, "earliest": earliest, "latest": latest, "tz": "+00:00",
            "calendar": "Q1985727"}


def year(y):
    return time_json(f"+{y:04d}-01-01T00:00:00Z", f"+{y:04d}-01-01T00:00:00Z", f"+{y:04d}-12-31T23:59:59Z")


def expected(p, s, o, rank="#normal", **attrs):
    a = {k: v for k, v in attrs.items()}
    a["#rank"] = [rank]
    return {"p": p, "args": [s, o], "attrs": a}


def build():
    docs, facts = [], []
    skolem = 0
    for i in range(1, 101):
        q = f"Q{1000 + i}"
        claims = {}

        def add(prop, st):
            claims.setdefault(prop, []).append(st)

        add("P31", statement(snak("P31", "wikibase-item", item("Q5")), references=1))
        facts.append(expected("P31", q, "Q5"))
        sex = "Q6581072" if i % 5 == 0 else "Q6581097"
        add("P21", statement(snak("P21", "wikibase-item", item(sex))))
        facts.append(expected("P21", q, sex))

        if i % 10 == 1:
            add("P22", statement(snak("P22", "wikibase-item", snaktype="somevalue")))
            facts.append(expected("P22", q, f"_:sk{skolem}"))
            skolem += 1
        if i % 10 == 2:
            add("P40", statement(snak("P40", "wikibase-item", snaktype="novalue")))
        if i % 10 == 3:
            add("P569", statement(snak("P569", "time", time_dv("+1900-00-00T00:00:00Z", 9)), rank="deprecated"))
            add("P569", statement(snak("P569", "time", time_dv("+1950-00-00T00:00:00Z", 9)), rank="preferred"))
            facts.append({"p": "P569", "args": [q, year(1950)], "attrs": {"#rank": ["#preferred"]}})
        if i % 10 == 4:
            spouse = f"Q{1000 + i + 1}"
            quals = [snak("P580", "time", time_dv("+1990-06-16T00:00:00Z", 11)),
                     snak("P276", "wikibase-item", item("Q90"))]
            add("P26", statement(snak("P26", "wikibase-item", item(spouse)), qualifiers=quals, references=2))
            day = time_json("+1990-06-16T00:00:00Z", "+1990-06-16T00:00:00Z", "+1990-06-16T23:59:59Z")
            facts.append(expected("P26", q, spouse, P580=[day], P276=["Q90"]))
        if i % 20 == 5:
            broken = {"type": "wikibase-entityid", "value": {"entity-type": "item"}}
            add("P27", statement(snak("P27", "wikibase-item", broken)))
        if i % 25 == 6:
            quals = [snak("P580", "time", snaktype="novalue"), snak("P582", "time", time_dv("+2010-00-00T00:00:00Z", 9))]
            add("P39", statement(snak("P39", "wikibase-item", item("Q30185")), qualifiers=quals))
            facts.append(expected("P39", q, "Q30185", P582=[year(2010)]))
        if i % 10 == 7:
            quals = [snak("P582", "time", snaktype="somevalue")]
            add("P108", statement(snak("P108", "wikibase-item", item("Q95")), qualifiers=quals))
            facts.append(expected("P108", q, "Q95", P582=[f"_:sk{skolem}"]))
            skolem += 1
        if i % 10 == 8:
            qty = {"type": "quantity", "value": {"amount": "+1200", "unit": "1", "upperBound": "+1250",
                                                 "lowerBound": "+1150"}}
            quals = [snak("P585", "time", time_dv("+2015-00-00T00:00:00Z", 9))]
            add("P1082", statement(snak("P1082", "quantity", qty), qualifiers=quals))
            value = {"type": "quantity", "amount": "1200", "lower": "1150", "upper": "1250", "unit": "1"}
            facts.append({"p": "P1082", "args": [q, value], "attrs": {"#rank": ["#normal"], "P585": [year(2015)]}})
        if i % 10 == 9:
            geo = {"type": "globecoordinate", "value": {"latitude": 52.5, "longitude": 13.5, "precision": 0.5,
                                                        "globe": "http://www.wikidata.org/entity/Q2"}}
            add("P625", statement(snak("P625", "globe-coordinate", geo)))
            value = {"type": "geo", "lat": 52.5, "lon": 13.5, "lat_min": 52.0, "lat_max": 53.0, "lon_min": 13.0,
                     "lon_max": 14.0, "globe": "Q2"}
            facts.append({"p": "P625", "args": [q, value], "attrs": {"#rank": ["#normal"]}})
        if i % 10 == 0:
            name = {"type": "monolingualtext", "value": {"text": f"Name {i}", "language": "en"}}
            add("P1448", statement(snak("P1448", "monolingualtext", name)))
            facts.append({"p": "P1448", "args": [q, {"type": "monolingualtext", "text": f"Name {i}", "language": "en"}],
                          "attrs": {"#rank": ["#normal"]}})
            url = {"type": "string", "value": f"https://example.org/{i}"}
            add("P856", statement(snak("P856", "url", url)))
            facts.append({"p": "P856", "args": [q, {"type": "iri", "value": f"https://example.org/{i}"}],
                          "attrs": {"#rank": ["#normal"]}})

        docs.append({"id": q, "type": "item", "labels": {"en": {"language": "en", "value": f"Person {i}"}},
                     "claims": claims})
    return docs, facts


def main():
    docs, facts = build()
    # Hand counts from the table in the module docstring.
    counts = {"documents": 100, "statements": 309, "facts_emitted": 284, "skolems_created": 20,
              "novalue_skipped": 10, "novalue_qualifiers_skipped": 4, "deprecated_skipped": 10,
              "deprecated_kept": 0, "references_ignored": 120, "malformed_snaks": 5}
    assert len(facts) == counts["facts_emitted"]
    ROOT.mkdir(exist_ok=True)
    (ROOT / "ingest_100.json").write_text(json.dumps(docs, indent=1) + "\n")
    (ROOT / "ingest_100.expected.jsonl").write_text("".join(json.dumps(f) + "\n" for f in facts))
    (ROOT / "ingest_100.counts.json").write_text(json.dumps(counts, indent=2) + "\n")


if __name__ == "__main__":
    main()
