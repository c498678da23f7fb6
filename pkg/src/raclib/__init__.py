"""Random Access Concatenated Libraries.

Pack many records or files into single equal-record-length library files and
fetch any member with one positioned read, wherever it sits. Ships serial
(line-per-member) and computed (arithmetically addressed) indexes, a caching
HTTP delivery service with a token-lock cache rotation protocol, domain
builds for death-record and brain-coordinate datasets, and a latency
benchmark harness.
"""

from .cache import BucketCache, DeliveryRequest, ImageResolver, bucket_name
from .computed_index import ComputedIndex, GroupEntry, TrigramKey, key_ordinal, trigram_of
from .errors import DuplicateKeyError, NotFoundError, RacLibError
from .neuro import RegionLibrary, Voxel, block_of, decode_coord, encode_coord
from .pack import Collection, CollectionSet, pack_directory
from .serial_index import SerialIndex, SerialIndexEntry
from .ssdi import DeathRecord, SearchQuery, SsdiLibrary
from .store import RecordSetRef, RecordStore

__version__ = "0.1.0"
