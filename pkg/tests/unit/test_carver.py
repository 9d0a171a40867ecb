"""Tests for ELF parsing and code carving."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binsleuth.carver import (
    BadMagic,
    CarverError,
    ElfClass,
    ElfData,
    EmptyInput,
    NoCode,
    NoSectionTable,
    Truncated,
    carve_bytes,
    carve_code,
    carve_file,
    carve_raw,
    parse_elf,
)
from binsleuth.types import CarveMode
from tests.test_data.elf_builder import (
    EM_MIPS,
    SHF_ALLOC,
    SHT_NOBITS,
    SectionSpec,
    build_elf,
    planted_code_elf,
    text_section,
)

CODE = bytes(range(0x40, 0x50))


class TestParseElf:
    """Test header and section table parsing."""

    def test_minimal_64bit_lsb(self):
        """One .text section with flags 0x6 resolves by name."""
        image = parse_elf(build_elf([text_section(CODE)]))

        assert image.word_class is ElfClass.ELF64
        assert image.data_encoding is ElfData.LSB
        text = image.section_by_name(".text")
        assert text is not None
        assert text.flags == 0x6
        assert text.size == 16

    def test_msb_encoding_parses_same_sections(self):
        """The byte-swapped MSB image yields the same section table."""
        lsb = parse_elf(build_elf([text_section(CODE)], little=True))
        msb = parse_elf(build_elf([text_section(CODE)], little=False))

        assert msb.data_encoding is ElfData.MSB
        assert [(s.name, s.flags, s.size) for s in msb.sections] == [(s.name, s.flags, s.size) for s in lsb.sections]

    @pytest.mark.parametrize("is_64", [True, False])
    @pytest.mark.parametrize("little", [True, False])
    def test_layouts_record_machine(self, is_64, little):
        """Test that every layout records machine and file type."""
        image = parse_elf(build_elf([text_section(CODE)], is_64=is_64, little=little, machine=EM_MIPS))

        assert image.word_class is (ElfClass.ELF64 if is_64 else ElfClass.ELF32)
        assert image.machine == EM_MIPS
        assert image.file_type == 1

    def test_random_bytes_are_bad_magic(self):
        """Test that random bytes fail the magic check."""
        with pytest.raises(BadMagic):
            parse_elf(b"\x12\x34\x56\x78")

    def test_empty_input_is_bad_magic(self):
        """Test that empty input fails the magic check."""
        with pytest.raises(BadMagic):
            parse_elf(b"")

    def test_unknown_class_byte(self):
        """Test that an unknown word-size byte fails the magic check."""
        image = bytearray(build_elf([text_section(CODE)]))
        image[4] = 7
        with pytest.raises(BadMagic):
            parse_elf(bytes(image))

    def test_truncated_header(self):
        """Test that a cut header is truncated."""
        with pytest.raises(Truncated):
            parse_elf(build_elf([text_section(CODE)])[:40])

    def test_truncated_section_table(self):
        """Test that a cut section table is truncated."""
        image = build_elf([text_section(CODE)])
        with pytest.raises(Truncated):
            parse_elf(image[:-10])

    def test_section_past_end_of_file(self):
        """Test that section bytes past the end are truncated."""
        image = bytearray(build_elf([text_section(CODE)], is_64=False))
        shoff = struct.unpack_from("<I", image, 32)[0]
        # Section 1 size field sits at offset 20 of its 40-byte entry.
        struct.pack_into("<I", image, shoff + 40 + 20, 1 << 20)
        with pytest.raises(Truncated):
            parse_elf(bytes(image))

    def test_zero_section_count(self):
        """Test that a zero section count means no section table."""
        image = bytearray(build_elf([text_section(CODE)]))
        struct.pack_into("<H", image, 60, 0)
        with pytest.raises(NoSectionTable):
            parse_elf(bytes(image))

    def test_missing_name_table_gives_empty_names(self):
        """Test that a missing name table leaves names empty."""
        image = parse_elf(build_elf([text_section(CODE)], shstrndx=0))
        assert all(section.name == "" for section in image.sections)

    def test_nobits_section_may_point_past_end(self):
        """Test that no-bits sections need no file bytes."""
        image = parse_elf(build_elf([
            text_section(CODE),
            SectionSpec(".bss", sh_type=SHT_NOBITS, nobits_size=1 << 30),
        ]))
        assert image.section_by_name(".bss").size == 1 << 30


class TestCarveCode:
    """Test the code-section predicate and concatenation."""

    @pytest.mark.parametrize("is_64", [True, False])
    @pytest.mark.parametrize("little", [True, False])
    def test_golden_fixtures_yield_planted_bytes(self, is_64, little):
        """Test that every layout yields the planted code."""
        data = planted_code_elf(CODE, is_64=is_64, little=little)
        sample = carve_code(parse_elf(data), data, "fixture")

        assert sample.data == CODE
        assert sample.section_count == 1
        assert sample.source_id == "fixture"

    def test_data_section_is_ignored(self):
        """Test that non-executable sections are skipped."""
        data = build_elf([
            text_section(CODE),
            SectionSpec(".data", data=b"\x99" * 64, flags=0x3),
        ])
        assert carve_code(parse_elf(data), data).data == CODE

    def test_nv_fatbin_without_exec_flag(self):
        """Test that .nv_fatbin counts as code without the exec flag."""
        payload = b"\xca\xfe" * 12
        data = build_elf([SectionSpec(".nv_fatbin", data=payload, flags=SHF_ALLOC)])
        assert carve_code(parse_elf(data), data).data == payload

    def test_nv_fatbin_match_is_case_sensitive(self):
        """Test that the .nv_fatbin name match is exact."""
        data = build_elf([SectionSpec(".NV_FATBIN", data=b"\x01\x02", flags=SHF_ALLOC)])
        with pytest.raises(NoCode):
            carve_code(parse_elf(data), data)

    def test_executable_nobits_section_is_no_code(self):
        """Test that executable no-bits sections hold no code."""
        data = build_elf([SectionSpec(".text", sh_type=SHT_NOBITS, flags=0x6, nobits_size=64)])
        with pytest.raises(NoCode):
            carve_code(parse_elf(data), data)

    def test_sections_concatenate_in_table_order(self):
        """Test that code sections join in table order."""
        data = build_elf([
            text_section(b"\x01\x02\x03", name=".init"),
            SectionSpec(".rodata", data=b"\xee" * 5),
            text_section(b"\x04\x05", name=".text"),
        ])
        sample = carve_code(parse_elf(data), data)

        assert sample.data == b"\x01\x02\x03\x04\x05"
        assert sample.section_lengths == (3, 2)

    def test_empty_executable_sections_are_not_counted(self):
        """Test that empty code sections add no length."""
        data = build_elf([text_section(b"", name=".init"), text_section(CODE)])
        sample = carve_code(parse_elf(data), data)
        assert sample.section_lengths == (16,)

    def test_container_endianness_does_not_change_bytes(self):
        """Test that header byte order does not alter the code bytes."""
        little = planted_code_elf(CODE, little=True)
        big = planted_code_elf(CODE, little=False)
        assert carve_code(parse_elf(little), little).data == carve_code(parse_elf(big), big).data


class TestCarveRaw:
    """Test raw-mode carving."""

    def test_identity(self):
        """Test that raw mode keeps every byte."""
        data = bytes(range(100))
        sample = carve_raw(data)
        assert sample.data == data
        assert sample.section_count == 1

    def test_empty_input(self):
        """Test that raw mode rejects empty input."""
        with pytest.raises(EmptyInput):
            carve_raw(b"")

    def test_raw_mode_keeps_elf_headers(self):
        """Test that raw mode does not parse ELF files."""
        data = planted_code_elf(CODE)
        assert carve_bytes(data, CarveMode.RAW).data == data

    def test_carve_file_uses_path_as_source_id(self, tmp_path):
        """Test that file carving records the path."""
        path = tmp_path / "prog.o"
        path.write_bytes(planted_code_elf(CODE))
        sample = carve_file(path)
        assert sample.source_id == str(path)
        assert sample.data == CODE


class TestParserFuzzing:
    """Any byte sequence gives an image or a typed error."""

    @settings(max_examples=300)
    @given(st.binary(max_size=512))
    def test_arbitrary_bytes(self, data):
        """Test that arbitrary bytes parse or raise a carver error."""
        try:
            image = parse_elf(data)
        except CarverError:
            return
        for section in image.sections:
            assert section.size >= 0

    def test_mutated_fixtures(self):
        """Test that corrupted fixtures never crash the parser."""
        base = planted_code_elf(CODE, is_64=False, little=False)
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            image = bytearray(base)
            for position in rng.integers(0, len(image), size=rng.integers(1, 8)):
                image[position] = int(rng.integers(0, 256))
            cut = int(rng.integers(0, len(image) + 1)) if rng.random() < 0.2 else len(image)
            data = bytes(image[:cut])
            try:
                carve_code(parse_elf(data), data)
            except CarverError:
                pass
