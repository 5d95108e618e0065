#!/usr/bin/env python
# Copyright (c) 2024 The panel-qte developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import hashlib

import pytest
import simplejson as json

import panel_qte
import panel_qte.exceptions as qte_exc
from panel_qte.service import manifest


RECORDS = [{'tau': 0.25, 'alpha': [0.5]}, {'tau': 0.75, 'alpha': [1.5]}]


def test_dump_record_sorts_keys():
    assert manifest.dump_record({'b': 1, 'a': [0.5]}) == \
        '{"a": [0.5], "b": 1}'


def test_file_digest(tmpdir):
    target = tmpdir.join('data.csv')
    target.write("unit,time,y\n")
    expected = hashlib.sha256(b"unit,time,y\n").hexdigest()
    assert manifest.file_digest(str(target)) == expected


def test_write_and_read(tmpdir):
    target = str(tmpdir.join('result.jsonl'))
    run = manifest.RunManifest(command='estimate', config={'seed': 1},
                               input_digests={'data.csv': 'abc'}, seed=1,
                               timings={'estimate': 0.5})
    digest = manifest.write_results(target, run, RECORDS)

    with open(target) as handle:
        lines = handle.read().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0])['manifest']['payload_digest'] == digest

    data, records = manifest.read_results(target)
    assert records == RECORDS
    assert data['command'] == 'estimate'
    assert data['version'] == panel_qte.__version__
    assert data['timings'] == {'estimate': 0.5}


def test_digest_ignores_timings(tmpdir):
    first = str(tmpdir.join('first.jsonl'))
    second = str(tmpdir.join('second.jsonl'))
    digest = manifest.write_results(
        first, manifest.RunManifest(command='cic', timings={'cic': 1.0}),
        RECORDS)
    again = manifest.write_results(
        second, manifest.RunManifest(command='cic', timings={'cic': 2.0}),
        RECORDS)
    assert digest == again
    with open(first) as one, open(second) as two:
        assert one.read().splitlines()[1:] == two.read().splitlines()[1:]


def test_write_to_stdout(capsys):
    manifest.write_results('-', manifest.RunManifest(command='test'),
                           RECORDS[:1])
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1]) == RECORDS[0]


def test_tampered_records(tmpdir):
    target = tmpdir.join('result.jsonl')
    manifest.write_results(str(target), manifest.RunManifest(command='x'),
                           RECORDS)
    text = target.read().replace('1.5', '2.5')
    target.write(text)
    with pytest.raises(qte_exc.PanelQteConfigurationReadError):
        manifest.read_results(str(target))


def test_not_a_result_file(tmpdir):
    target = tmpdir.join('other.jsonl')
    target.write('{"alpha": 1}\n')
    with pytest.raises(qte_exc.PanelQteConfigurationReadError):
        manifest.read_results(str(target))
    target.write('')
    with pytest.raises(qte_exc.PanelQteConfigurationReadError):
        manifest.read_results(str(target))
