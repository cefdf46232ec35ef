#ifndef DTCWT_FILTERBANK_HPP
#define DTCWT_FILTERBANK_HPP

#include <string>
#include <vector>

namespace dtcwt {

/// Decomposition level 1 uses a single biorthogonal analysis/synthesis pair;
/// the two trees are realized as the even/odd polyphase phases of the
/// full-rate convolution, so no second filter set is needed here.
struct Biorth1Filters {
    std::vector<double> analysis_low;
    std::vector<double> analysis_high;
    std::vector<double> synthesis_low;
    std::vector<double> synthesis_high;
};

/// Q-shift pairs for levels >= 2. Tree b is the element-order reversal of
/// tree a, which gives the approximate half-sample-delay (Hilbert) pairing
/// and makes symmetric boundary extension exact across the two trees.
struct QshiftFilters {
    std::vector<double> tree_a_low;
    std::vector<double> tree_a_high;
    std::vector<double> tree_b_low;
    std::vector<double> tree_b_high;
};

struct FilterBank {
    Biorth1Filters level1;
    QshiftFilters qshift;
    std::string name;

    /// Correlation centers for the level-1 filters. Odd-length symmetric
    /// filters center at (len-1)/2; even-length pairs use len/2 for analysis
    /// and len/2-1 for synthesis so the composite response peaks at zero lag.
    int center(const std::vector<double>& h, bool synthesis) const;

    /// Even-length level-1 filters cannot close a symmetric (reflected)
    /// boundary per channel, so such banks run level 1 periodically.
    bool level1_periodic() const { return level1.analysis_low.size() % 2 == 0; }
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    bool informational = false;
    double residual = 0.0;
    double threshold = 0.0;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.informational && !c.passed) return false;
        return true;
    }
};

/// Built-in banks: "nearsym13_19+qshift14" (canonical) and "haar-test"
/// (degenerate 2-tap bank; perfect reconstruction holds but the trees do not
/// form a Hilbert pair — test use only).
FilterBank builtin_filter_bank(const std::string& name);
std::vector<std::string> builtin_filter_bank_names();

/// Runs the perfect-reconstruction and magnitude-match oracles; failures are
/// reported in the returned checks, never thrown.
ValidationReport validate_filter_bank(const FilterBank& fb);

/// Plain-text bank file: "[section]" headers (level1.analysis_low, ...,
/// qshift.b_high), one coefficient per line, '#' comments. Does not
/// auto-validate; callers decide.
FilterBank load_filter_bank(const std::string& path);
void save_filter_bank(const FilterBank& fb, const std::string& path);

/// Name or path: tries built-ins first, then the filesystem.
FilterBank resolve_filter_bank(const std::string& name_or_path);

}  // namespace dtcwt

#endif
