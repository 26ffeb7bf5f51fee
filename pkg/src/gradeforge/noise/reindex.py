"""Stamp repair from record indices.

Channels publish on an exact index/rate grid, so a record's true time is
fully determined by its index. Rewriting every stamp from the indices
removes any timing fault injected upstream (delayed clock stamps, for
example) and is a no-op on a healthy log.
"""

from __future__ import annotations

from ..sim.log import Record, RecordLog, base_channel


def reindex_log(log: RecordLog) -> RecordLog:
    """Rewrite every record stamp as start_offset + index / channel rate.

    The per-channel indices must be gap free from zero; a gap means
    records were lost and the grid cannot be trusted, so the repair
    refuses rather than guessing.
    """
    log.check_indices()
    records = []
    for rec in log.records:
        base = base_channel(rec.channel)
        if base == "start_experiment":
            stamp = log.start_offset
        else:
            rate = log.channel_rate(rec.channel)
            stamp = log.start_offset + rec.index / rate
        records.append(Record(rec.channel, rec.index, stamp, rec.payload))
    return RecordLog(
        config=log.config,
        scene_manifest=log.scene_manifest,
        namespaces=log.namespaces,
        start_offset=log.start_offset,
        channel_names=log.channel_names,
        records=records,
    )
