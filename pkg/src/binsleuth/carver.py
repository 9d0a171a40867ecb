"""
Code carver for ELF images and headerless blobs.

Parses the ELF identification, file header and section header table with
``struct`` (both word classes and both encodings), then extracts only the
bytes of executable sections. Everything that is not object code, including
all headers, is discarded before feature generation.
"""

import logging
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from .types import BinSleuthError, CarveMode, CodeSample

logger = logging.getLogger(__name__)

ELF_MAGIC = b"\x7fELF"

SHF_EXECINSTR = 0x4
SHT_NOBITS = 8
SHN_UNDEF = 0
SHN_XINDEX = 0xFFFF
CUDA_FATBIN_SECTION = ".nv_fatbin"


class CarverError(BinSleuthError):
    """Base class for carving failures."""
    pass


class BadMagic(CarverError):
    """Input is not an ELF image (magic or identification bytes invalid)."""
    pass


class Truncated(CarverError):
    """A header, the section table or a section lies outside the input."""
    pass


class NoSectionTable(CarverError):
    """The image declares no section headers; raw mode is the fallback."""
    pass


class NoCode(CarverError):
    """No executable section with file bytes was found."""
    pass


class EmptyInput(CarverError):
    """Raw carving was asked to treat an empty input as code."""
    pass


class ElfClass(Enum):
    """EI_CLASS values."""
    ELF32 = 1
    ELF64 = 2


class ElfData(Enum):
    """EI_DATA values."""
    LSB = 1
    MSB = 2


@dataclass(frozen=True)
class _HeaderLayout:
    header_size: int
    shoff: str
    shoff_at: int
    tail_at: int
    section_size: int
    section_format: str


# Tail = e_shentsize, e_shnum, e_shstrndx. Section formats cover
# sh_name, sh_type, sh_flags, sh_addr, sh_offset, sh_size.
_LAYOUTS = {
    ElfClass.ELF32: _HeaderLayout(52, "I", 32, 46, 40, "IIIIII"),
    ElfClass.ELF64: _HeaderLayout(64, "Q", 40, 58, 64, "IIQQQQ"),
}


@dataclass(frozen=True)
class SectionRecord:
    """One entry of the section header table."""
    index: int
    name: str
    section_type: int
    flags: int
    file_offset: int
    size: int

    @property
    def is_executable(self) -> bool:
        return bool(self.flags & SHF_EXECINSTR)

    @property
    def occupies_file(self) -> bool:
        return self.section_type != SHT_NOBITS


@dataclass(frozen=True)
class ElfImage:
    """Parsed view of an ELF container (headers only, no contents)."""
    word_class: ElfClass
    data_encoding: ElfData
    sections: List[SectionRecord] = field(default_factory=list)
    machine: int = 0
    file_type: int = 0

    def section_by_name(self, name: str) -> Optional[SectionRecord]:
        for section in self.sections:
            if section.name == name:
                return section
        return None


def _unpack(fmt: str, data: bytes, offset: int):
    end = offset + struct.calcsize(fmt)
    if offset < 0 or end > len(data):
        raise Truncated(f"Read of {end - offset} bytes at offset {offset} exceeds input of {len(data)} bytes")
    return struct.unpack_from(fmt, data, offset)


def _c_string(table: bytes, offset: int) -> str:
    if offset >= len(table):
        return ""
    end = table.find(b"\x00", offset)
    if end < 0:
        end = len(table)
    return table[offset:end].decode("utf-8", errors="replace")


def parse_elf(data: bytes) -> ElfImage:
    """
    Parse the ELF file header and section header table.

    Args:
        data: Complete file contents

    Returns:
        ElfImage with section names resolved through the section-name table

    Raises:
        BadMagic: If the input is not an ELF image
        Truncated: If a header or the section table runs past the input
        NoSectionTable: If the image declares zero section headers
    """
    if len(data) < 4 or data[:4] != ELF_MAGIC:
        raise BadMagic("Missing ELF magic 7f 45 4c 46")
    if len(data) < 6:
        raise Truncated("Input ends inside the ELF identification bytes")

    try:
        word_class = ElfClass(data[4])
    except ValueError:
        raise BadMagic(f"Unknown ELF class byte {data[4]:#x}") from None
    try:
        encoding = ElfData(data[5])
    except ValueError:
        raise BadMagic(f"Unknown ELF data encoding byte {data[5]:#x}") from None

    layout = _LAYOUTS[word_class]
    if len(data) < layout.header_size:
        raise Truncated(f"{word_class.name} header needs {layout.header_size} bytes, input has {len(data)}")

    order = "<" if encoding is ElfData.LSB else ">"
    file_type, machine = _unpack(order + "HH", data, 16)
    (shoff,) = _unpack(order + layout.shoff, data, layout.shoff_at)
    shentsize, shnum, shstrndx = _unpack(order + "HHH", data, layout.tail_at)

    if shnum == 0 or shoff == 0:
        raise NoSectionTable("Section header count is zero")
    if shentsize < layout.section_size:
        raise Truncated(f"Section header entry size {shentsize} below {layout.section_size}")
    if shoff + shnum * shentsize > len(data):
        raise Truncated(f"Section table ({shnum} x {shentsize} at {shoff}) exceeds input of {len(data)} bytes")

    raw_sections = []
    for index in range(shnum):
        fields = _unpack(order + layout.section_format, data, shoff + index * shentsize)
        name_offset, section_type, flags, _addr, offset, size = fields
        if section_type != SHT_NOBITS and offset + size > len(data):
            raise Truncated(
                f"Section {index} ({offset}+{size}) exceeds input of {len(data)} bytes"
            )
        raw_sections.append((index, name_offset, section_type, flags, offset, size))

    names = b""
    if shstrndx not in (SHN_UNDEF, SHN_XINDEX) and shstrndx < shnum:
        _, _, strtab_type, _, strtab_offset, strtab_size = raw_sections[shstrndx]
        if strtab_type != SHT_NOBITS:
            names = data[strtab_offset:strtab_offset + strtab_size]

    sections = [
        SectionRecord(
            index=index,
            name=_c_string(names, name_offset),
            section_type=section_type,
            flags=flags,
            file_offset=offset,
            size=size,
        )
        for index, name_offset, section_type, flags, offset, size in raw_sections
    ]
    return ElfImage(
        word_class=word_class,
        data_encoding=encoding,
        sections=sections,
        machine=machine,
        file_type=file_type,
    )


def is_code_section(section: SectionRecord) -> bool:
    """Code predicate: executable flag or the CUDA fat-binary section, with file bytes."""
    if not section.occupies_file:
        return False
    return section.is_executable or section.name == CUDA_FATBIN_SECTION


def carve_code(image: ElfImage, data: bytes, source_id: str = "") -> CodeSample:
    """
    Concatenate every code section of a parsed image in section-table order.

    Raises:
        NoCode: If no section matched or every match is empty
    """
    chunks = []
    lengths = []
    for section in image.sections:
        if not is_code_section(section) or section.size == 0:
            continue
        chunks.append(data[section.file_offset:section.file_offset + section.size])
        lengths.append(section.size)

    if not chunks:
        raise NoCode(f"No executable section with file bytes in {source_id or 'input'}")

    logger.debug(f"Carved {len(chunks)} code sections ({sum(lengths)} bytes) from {source_id or 'input'}")
    return CodeSample(data=b"".join(chunks), source_id=source_id, section_lengths=tuple(lengths))


def carve_raw(data: bytes, source_id: str = "") -> CodeSample:
    """Treat the whole input as a single code section (headerless blobs)."""
    if not data:
        raise EmptyInput(f"Empty input {source_id}".strip())
    return CodeSample(data=bytes(data), source_id=source_id, section_lengths=(len(data),))


def carve_bytes(data: bytes, mode: CarveMode = CarveMode.ELF, source_id: str = "") -> CodeSample:
    """Carve an in-memory input in the given mode."""
    if CarveMode(mode) is CarveMode.RAW:
        return carve_raw(data, source_id)
    return carve_code(parse_elf(data), data, source_id)


def carve_file(path: Union[str, Path], mode: CarveMode = CarveMode.ELF) -> CodeSample:
    """Read a file from disk and carve it; the path becomes the source id."""
    path = Path(path)
    data = path.read_bytes()
    return carve_bytes(data, mode, source_id=str(path))
