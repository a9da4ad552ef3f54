"""Closed vocabularies shared by every stage.

Values are plain strings so they serialize to JSON unchanged.
"""

# Apple privacy label tiers
TRACK = "DataUsedToTrackYou"
LINKED = "DataLinkedToYou"
NOT_LINKED = "DataNotLinkedToYou"
NOT_COLLECTED = "DataNotCollected"

PRIVACY_TYPES = (TRACK, LINKED, NOT_LINKED, NOT_COLLECTED)
COLLECTION_TYPES = (TRACK, LINKED, NOT_LINKED)

PURPOSES = (
    "AppFunctionality",
    "Analytics",
    "DevelopersAdvertising",
    "ThirdPartyAdvertising",
    "ProductPersonalization",
    "OtherPurposes",
)

DATA_CATEGORIES = (
    "ContactInfo",
    "HealthAndFitness",
    "FinancialInfo",
    "Location",
    "SensitiveInfo",
    "Contacts",
    "UserContent",
    "BrowsingHistory",
    "SearchHistory",
    "Identifiers",
    "Purchases",
    "UsageData",
    "Diagnostics",
)

# OPP-115 high-level data practices
FP = "FirstPartyCollectionUse"
TP = "ThirdPartyCollectionSharing"
ISA = "InternationalSpecificAudiences"

PRACTICES = (
    FP,
    TP,
    "UserChoiceControl",
    "UserAccessEditDeletion",
    "DataRetention",
    "DataSecurity",
    "PolicyChange",
    "DoNotTrack",
    ISA,
    "Other",
)

SEGMENT_PRACTICES = "SegmentPractices"
DOES_DOES_NOT = "DoesDoesNot"
IDENTIFIABILITY = "Identifiability"
PURPOSE = "Purpose"
PERSONAL_INFO_TYPE = "PersonalInformationType"
AUDIENCE_TYPE = "AudienceType"
ACTION_FIRST_PARTY = "ActionFirstParty"
ACTION_THIRD_PARTY = "ActionThirdParty"

ATTRIBUTE_VALUES = {
    DOES_DOES_NOT: ("Does", "DoesNot"),
    IDENTIFIABILITY: ("Identifiable", "Aggregated", "Other", "Unspecified"),
    PURPOSE: (
        "AdditionalService",
        "Advertising",
        "AnalyticsResearch",
        "BasicService",
        "LegalRequirement",
        "Marketing",
        "Merger",
        "Personalization",
        "ServiceOperationAndSecurity",
        "Unspecified",
        "Other",
    ),
    PERSONAL_INFO_TYPE: (
        "ComputerInformation",
        "Contact",
        "CookiesAndTrackingElements",
        "Demographic",
        "Financial",
        "GenericPersonalInformation",
        "Health",
        "IPAddressAndDeviceIDs",
        "Location",
        "PersonalIdentifier",
        "SocialMediaData",
        "SurveyData",
        "UserOnlineActivities",
        "UserProfile",
        "Unspecified",
        "Other",
    ),
    AUDIENCE_TYPE: (
        "Children",
        "Californians",
        "Europeans",
        "CitizensFromOtherCountries",
        "Other",
    ),
    ACTION_FIRST_PARTY: (
        "CollectOnWebsite",
        "CollectInMobileApp",
        "CollectOnMobileWebsite",
        "ReceiveFromAffiliates",
        "ReceiveFromThirdParty",
        "TrackOnOtherWebsites",
        "Other",
        "Unspecified",
    ),
    ACTION_THIRD_PARTY: (
        "CollectOnFirstPartyWebsiteApp",
        "ReceiveSharedWith",
        "See",
        "TrackOnFirstPartyWebsiteApp",
        "Other",
        "Unspecified",
    ),
}

# every classifier in the stack, segment classifier first
CLASSIFIER_ATTRIBUTES = (SEGMENT_PRACTICES,) + tuple(ATTRIBUTE_VALUES)

# attributes run when a collection practice is predicted
COLLECTION_ATTRIBUTES = (DOES_DOES_NOT, IDENTIFIABILITY, PURPOSE, PERSONAL_INFO_TYPE)

PRICE_MODELS = ("Free", "FreeWithIAP", "Paid", "PaidWithIAP")
CONTENT_RATINGS = ("R4Plus", "R9Plus", "R12Plus", "R17Plus")
RATING_STRINGS = {"4+": "R4Plus", "9+": "R9Plus", "12+": "R12Plus", "17+": "R17Plus"}


def vocabulary_for(attribute):
    if attribute == SEGMENT_PRACTICES:
        return PRACTICES
    return ATTRIBUTE_VALUES[attribute]
