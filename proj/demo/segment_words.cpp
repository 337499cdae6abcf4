// Segments a few words both ways and checks each WordPiece split against the
// derivational one.
//
//   demo_segment [word...]

#include <iostream>

#include "morphseg/morphseg.hpp"

int main(int argc, char** argv)
{
    const std::filesystem::path data = MORPHSEG_DATA_DIR;
    const morphseg::Resources res(data / "bert-base-uncased-vocab.txt", data / "prefixes.txt", data / "suffixes.txt",
                                  data / "stopwords-en.txt");
    const auto ctx = res.context();

    std::vector<std::string> words(argv + 1, argv + argc);
    if (words.empty()) words = {"superbizarre", "unlockable", "templatize", "tribalize", "happiness"};

    for (const auto& raw : words) {
        const auto word = morphseg::to_lower(raw);
        const auto wp = ctx.wordpiece(word);
        const auto ds = ctx.derivational(word);
        std::cout << word << "\n  wordpiece:    " << morphseg::join(wp.tokens, " ") << "\n";
        if (!ds) {
            std::cout << "  derivational: (not derivable)\n";
            continue;
        }
        std::cout << "  derivational: " << morphseg::join(morphseg::serialize_delbert(*ds, ctx.vocab), " ") << "\n"
                  << "  stem kept whole by wordpiece: " << (morphseg::check_validity(word, wp, *ds) ? "yes" : "no")
                  << "\n";
    }
}
