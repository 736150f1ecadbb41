#include "textnorm.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>

#include <vector>

#include "error.hpp"

namespace headgate {

namespace {

std::u16string utf8_to_utf16(std::string_view utf8) {
    if (utf8.empty()) return {};
    std::u16string out(utf8.size() + 1, u'\0');
    UErrorCode ec = U_ZERO_ERROR;
    int32_t len = 0;
    // Invalid UTF-8 bytes become U+FFFD rather than failing the judge.
    u_strFromUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, utf8.data(),
                         static_cast<int32_t>(utf8.size()), 0xFFFD, nullptr, &ec);
    if (U_FAILURE(ec)) throw HgError(Err::Invalid, "normalize: UTF-8 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::string utf16_to_utf8(const std::u16string& utf16) {
    if (utf16.empty()) return {};
    std::string out(utf16.size() * 4, '\0');
    UErrorCode ec = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len, utf16.data(),
                static_cast<int32_t>(utf16.size()), &ec);
    if (U_FAILURE(ec)) throw HgError(Err::Invalid, "normalize: UTF-16 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::u16string nfc(const std::u16string& in) {
    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw HgError(Err::Invalid, "normalize: NFC instance unavailable");
    std::u16string out(in.size() + 16, u'\0');
    for (;;) {
        ec = U_ZERO_ERROR;
        int32_t len = unorm2_normalize(norm, in.data(), static_cast<int32_t>(in.size()),
                                       out.data(), static_cast<int32_t>(out.size()), &ec);
        if (ec == U_BUFFER_OVERFLOW_ERROR) {
            out.resize(static_cast<std::size_t>(len) + 1);
            continue;
        }
        if (U_FAILURE(ec)) throw HgError(Err::Invalid, "normalize: NFC failed");
        out.resize(static_cast<std::size_t>(len));
        return out;
    }
}

std::u16string casefold(const std::u16string& in) {
    std::u16string out(in.size() * 2 + 16, u'\0');
    for (;;) {
        UErrorCode ec = U_ZERO_ERROR;
        int32_t len = u_strFoldCase(out.data(), static_cast<int32_t>(out.size()), in.data(),
                                    static_cast<int32_t>(in.size()), U_FOLD_CASE_DEFAULT, &ec);
        if (ec == U_BUFFER_OVERFLOW_ERROR) {
            out.resize(static_cast<std::size_t>(len) + 1);
            continue;
        }
        if (U_FAILURE(ec)) throw HgError(Err::Invalid, "normalize: casefold failed");
        out.resize(static_cast<std::size_t>(len));
        return out;
    }
}

// Collapse runs of White_Space codepoints to one space and trim the edges.
std::u16string collapse_whitespace(const std::u16string& in) {
    std::u16string out;
    out.reserve(in.size());
    bool pending_space = false;
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(in.size());
    while (i < n) {
        UChar32 c;
        U16_NEXT(in.data(), i, n, c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(u' ');
            pending_space = false;
        }
        char16_t unit[2];
        int32_t ulen = 0;
        UBool err = false;
        U16_APPEND(unit, ulen, 2, c, err);
        if (!err) out.append(unit, static_cast<std::size_t>(ulen));
    }
    return out;
}

}  // namespace

std::string sanitize_utf8(std::string_view bytes) {
    return utf16_to_utf8(utf8_to_utf16(bytes));
}

std::string normalize_answer(std::string_view utf8) {
    std::u16string text = collapse_whitespace(casefold(nfc(utf8_to_utf16(utf8))));
    if (!text.empty() && text.back() == u'.') {
        text.pop_back();
        while (!text.empty() && text.back() == u' ') text.pop_back();
    }
    return utf16_to_utf8(text);
}

bool contains_token_bounded(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        const bool starts_ok = pos == 0 || haystack[pos - 1] == ' ';
        const std::size_t end = pos + needle.size();
        const bool ends_ok = end == haystack.size() || haystack[end] == ' ';
        if (starts_ok && ends_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace headgate
