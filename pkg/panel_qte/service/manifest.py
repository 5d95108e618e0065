# coding=utf-8
#
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
"""Result files: a manifest line followed by one JSON record per line.

    {"manifest": {"command": "estimate", ..., "payload_digest": "..."}}
    {"alpha": [0.61], "beta": [[...]], "n": 500, "objective": 0.0, ...}
    ...

Records are serialized with sorted keys. The manifest's payload_digest
is the sha256 of the record lines, so two runs with the same inputs and
seed produce the same digest; wall-clock timings live in the manifest
only and are not hashed.
"""

import hashlib
import logging
import sys

import attr
import simplejson as json

import panel_qte
import panel_qte.exceptions as qte_exc

LOGGER = logging.getLogger(__name__)


def file_digest(path):
    """Return the sha256 hex digest of a file's content."""
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def dump_record(record):
    """Serialize one record as a single line."""
    return json.dumps(record, sort_keys=True)


def payload_digest(lines):
    """Return the sha256 hex digest of serialized record lines."""
    digest = hashlib.sha256()
    for line in lines:
        digest.update(line.encode('utf-8'))
        digest.update(b'\n')
    return digest.hexdigest()


@attr.s(frozen=True)
class RunManifest(object):
    """Provenance of a result file.

    Attributes:
        command: the sub-command that produced the file.
        config: the run configuration.
        input_digests: {path: sha256} of the input files.
        seed: the run seed.
        timings: {step: seconds}.
        version: panel_qte version.
    """

    command = attr.ib()
    config = attr.ib(factory=dict)
    input_digests = attr.ib(factory=dict)
    seed = attr.ib(default=None)
    timings = attr.ib(factory=dict)
    version = attr.ib(default=panel_qte.__version__)

    def to_dict(self, digest=None):
        """Return the manifest as a dict, with the payload digest."""
        data = attr.asdict(self)
        if digest is not None:
            data['payload_digest'] = digest
        return data


def write_results(path, manifest, records):
    """Write a manifest line and the records to ``path`` ('-' for stdout).

    Returns:
        the payload digest.
    """
    lines = [dump_record(record) for record in records]
    digest = payload_digest(lines)
    text = "\n".join([dump_record({'manifest': manifest.to_dict(digest)})] +
                     lines) + "\n"
    if path == '-':
        sys.stdout.write(text)
    else:
        with open(path, 'w') as handle:
            handle.write(text)
    LOGGER.info("Wrote %d records to %s", len(lines), path)
    return digest


def read_results(path):
    """Read a result file.

    Returns:
        (manifest dict, list of record dicts)

    Raises:
        PanelQteConfigurationReadError: the file has no manifest line or
            its records do not match the manifest digest.
    """
    with open(path, 'r') as handle:
        lines = [line.rstrip('\n') for line in handle if line.strip()]
    try:
        manifest = json.loads(lines[0])['manifest']
        records = [json.loads(line) for line in lines[1:]]
    except (IndexError, KeyError, TypeError, json.JSONDecodeError) as error:
        msg = "{} is not a result file: {}".format(path, error)
        LOGGER.error(msg)
        raise qte_exc.PanelQteConfigurationReadError(msg)
    expected = manifest.get('payload_digest')
    if expected is not None and expected != payload_digest(lines[1:]):
        msg = "records of {} do not match their manifest digest".format(path)
        LOGGER.error(msg)
        raise qte_exc.PanelQteConfigurationReadError(msg)
    return manifest, records
