#include <catch2/catch_amalgamated.hpp>

#include "codenat/subtoken.hpp"

using namespace codenat;

TEST_CASE("subtoken splitting") {
    CHECK(split_subtokens("swapBlank") == std::vector<std::string>{"swap", "blank"});
    CHECK(split_subtokens("x") == std::vector<std::string>{"x"});
    CHECK(split_subtokens("to_float4") == std::vector<std::string>{"to", "float", "4"});
    CHECK(split_subtokens("XMLHttpRequest") ==
          std::vector<std::string>{"xml", "http", "request"});
    CHECK(split_subtokens("__init__") == std::vector<std::string>{"init"});
    CHECK(split_subtokens("buf2buf") == std::vector<std::string>{"buf", "2", "buf"});
    CHECK(split_subtokens("HTML") == std::vector<std::string>{"html"});
    CHECK(split_subtokens("parseJSON2xml") ==
          std::vector<std::string>{"parse", "json", "2", "xml"});
}
